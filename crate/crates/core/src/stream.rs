//! Labeled point streams: the drifting three-cluster generator and a CSV loader.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Label, Result, Vector};

/// One arriving point. The label stays hidden from the learner until probed.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamPoint {
    pub index: u64,
    /// Raw features, before the bias coordinate is appended.
    pub features: Vector,
    pub true_label: Label,
    /// Generating cluster (0-based), when known.
    pub cluster: Option<usize>,
}

/// Three isotropic 2-D clusters. Cluster 0 is the positive class; the negative
/// draws alternate between clusters 1 and 2 every `block_len` points.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStreamConfig {
    pub centers: [[f64; 2]; 3],
    pub std_dev: f64,
    pub block_len: usize,
    pub total_points: usize,
    /// Fraction of each block drawn from the positive cluster.
    pub mix_c1: f64,
    pub seed: u64,
}

impl Default for ClusterStreamConfig {
    fn default() -> Self {
        ClusterStreamConfig {
            centers: [[0.0, 2.0], [-2.0, -1.0], [2.0, -1.0]],
            std_dev: 0.3,
            block_len: 20,
            total_points: 100,
            mix_c1: 0.5,
            seed: 0,
        }
    }
}

impl ClusterStreamConfig {
    pub fn validate(&self) -> Result<()> {
        let c = &self.centers;
        if c.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("cluster centers must be finite".into()));
        }
        if c[0] == c[1] || c[0] == c[2] || c[1] == c[2] {
            return Err(Error::InvalidConfig("cluster centers must be pairwise distinct".into()));
        }
        if !self.std_dev.is_finite() || self.std_dev <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "std_dev must be positive, got {}",
                self.std_dev
            )));
        }
        if self.block_len == 0 {
            return Err(Error::InvalidConfig("block_len must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.mix_c1) {
            return Err(Error::InvalidConfig(format!(
                "mix_c1 must lie in [0, 1], got {}",
                self.mix_c1
            )));
        }
        Ok(())
    }

    /// Negative-source cluster at stream position `index`: 1 on even blocks, 2 on odd ones.
    pub fn negative_cluster(&self, index: usize) -> usize {
        if (index / self.block_len).is_multiple_of(2) {
            1
        } else {
            2
        }
    }
}

pub fn generate_cluster_stream(cfg: &ClusterStreamConfig) -> Result<Vec<StreamPoint>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points = Vec::with_capacity(cfg.total_points);
    for i in 0..cfg.total_points {
        let from_positive = rng.random::<f64>() < cfg.mix_c1;
        let cluster = if from_positive { 0 } else { cfg.negative_cluster(i) };
        let center = cfg.centers[cluster];
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        points.push(StreamPoint {
            index: i as u64,
            features: Vector::from_column_slice(&[center[0] + cfg.std_dev * dx, center[1] + cfg.std_dev * dy]),
            true_label: if cluster == 0 { Label::Positive } else { Label::Negative },
            cluster: Some(cluster),
        });
    }
    Ok(points)
}

/// Appends the constant-1 bias coordinate.
pub fn augment_bias(x: &Vector) -> Vector {
    x.clone().push(1.0)
}

/// Reads `f1,...,fd,label` rows; `#` lines are comments.
pub fn load_csv_stream(path: impl AsRef<Path>) -> Result<Vec<StreamPoint>> {
    let path = path.as_ref();
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::FileNotFound(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    parse_csv_stream(&text)
}

pub fn parse_csv_stream(text: &str) -> Result<Vec<StreamPoint>> {
    let mut dim = None;
    let mut points = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(d) = dim else {
            if fields.len() < 2 || fields.last() != Some(&"label") {
                return Err(Error::Parse {
                    line: line_no,
                    message: "header must be `f1,...,fd,label`".into(),
                });
            }
            dim = Some(fields.len() - 1);
            continue;
        };
        if fields.len() != d + 1 {
            return Err(Error::DimensionInconsistent {
                line: line_no,
                expected: d,
                found: fields.len().saturating_sub(1),
            });
        }
        let mut features = Vec::with_capacity(d);
        for token in &fields[..d] {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{token}` is not a number"),
            })?;
            features.push(value);
        }
        let token = fields[d];
        let true_label = token.parse::<Label>().map_err(|_| Error::InvalidLabel {
            line: line_no,
            token: token.to_string(),
        })?;
        points.push(StreamPoint {
            index: points.len() as u64,
            features: Vector::from_vec(features),
            true_label,
            cluster: None,
        });
    }
    Ok(points)
}

/// Serializes points in the format [`parse_csv_stream`] reads.
///
/// Features are written with Rust's shortest round-trip formatting, so parsing
/// the output reproduces every value exactly.
pub fn to_csv(points: &[StreamPoint]) -> String {
    let dim = points.first().map_or(0, |p| p.features.len());
    let mut out = String::new();
    for j in 1..=dim {
        out.push_str(&format!("f{j},"));
    }
    out.push_str("label\n");
    for p in points {
        for v in p.features.iter() {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", p.true_label));
    }
    out
}
