//! Prequential experiment runner and its CSV outputs.
//!
//! Each point is first scored with the classifier as it stood at the end of the
//! previous step, then handed to the policy. Probed points pay their actual
//! label-dependent probe cost and are left out of accuracy and misclassification
//! scoring; every other point pays the realized misclassification cost.

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::engine::{self, EngineConfig, LabelOracle, LearnerState};
use crate::policy::{random_policy, uncertainty_policy, vop_only_policy, PolicyDecision};
use crate::stream::{augment_bias, generate_cluster_stream, load_csv_stream};
use crate::{
    ClusterStreamConfig, Error, Label, LabeledPoint, PointId, PolicyKind, ProbeCosts, Result, RiskMatrix, StreamPoint,
    Vector,
};

/// Optimization horizon: a fixed number of points or the stream length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    StreamLen,
    Points(f64),
}

impl Horizon {
    pub fn resolve(self, stream_len: usize) -> f64 {
        match self {
            Horizon::StreamLen => stream_len as f64,
            Horizon::Points(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub s_buffer: usize,
    pub k_horiz: Horizon,
    pub risk: RiskMatrix,
    pub probe_costs: ProbeCosts,
    /// Probe probability of the `random` policy.
    pub random_p: f64,
    pub cluster: ClusterStreamConfig,
    /// Generator seed pinned by a config file; otherwise the run seed is used.
    pub cluster_seed: Option<u64>,
}

impl Default for ExperimentConfig {
    /// Symmetric unit risk and unit probe cost, buffer of 5, horizon = stream length.
    fn default() -> Self {
        ExperimentConfig {
            s_buffer: 5,
            k_horiz: Horizon::StreamLen,
            risk: RiskMatrix { r12: 1.0, r21: 1.0 },
            probe_costs: ProbeCosts {
                cost_pos: 1.0,
                cost_neg: 1.0,
            },
            random_p: 0.05,
            cluster: ClusterStreamConfig::default(),
            cluster_seed: None,
        }
    }
}

impl ExperimentConfig {
    /// Missing the positive class costs twice as much; probing a positive costs 2, a negative 1.
    pub fn asymmetric() -> Self {
        ExperimentConfig {
            risk: RiskMatrix { r12: 2.0, r21: 1.0 },
            probe_costs: ProbeCosts {
                cost_pos: 2.0,
                cost_neg: 1.0,
            },
            random_p: 0.1,
            ..ExperimentConfig::default()
        }
    }

    pub fn engine_config(&self, stream_len: usize) -> EngineConfig {
        EngineConfig {
            s_buffer: self.s_buffer,
            k_horiz: self.k_horiz.resolve(stream_len),
            risk: self.risk,
            probe_costs: self.probe_costs,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => e.into(),
        })?;
        Self::from_toml_str(&text)
    }

    /// Parses flat `key = value` settings on top of the defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))?;
        let mut cfg = ExperimentConfig::default();
        if let Some(v) = raw.s_buffer {
            cfg.s_buffer = v;
        }
        if let Some(h) = raw.k_horiz {
            cfg.k_horiz = match h {
                RawHorizon::Number(k) => Horizon::Points(k),
                RawHorizon::Keyword(s) if s == "stream_len" => Horizon::StreamLen,
                RawHorizon::Keyword(s) => {
                    return Err(Error::InvalidConfig(format!(
                        "k_horiz must be a number or \"stream_len\", got \"{s}\""
                    )))
                }
            };
        }
        cfg.risk.r12 = raw.r12.unwrap_or(cfg.risk.r12);
        cfg.risk.r21 = raw.r21.unwrap_or(cfg.risk.r21);
        cfg.probe_costs.cost_pos = raw.probe_cost_pos.unwrap_or(cfg.probe_costs.cost_pos);
        cfg.probe_costs.cost_neg = raw.probe_cost_neg.unwrap_or(cfg.probe_costs.cost_neg);
        cfg.random_p = raw.random_p.unwrap_or(cfg.random_p);
        if let Some(c) = raw.cluster {
            let d = &mut cfg.cluster;
            d.centers = c.centers.unwrap_or(d.centers);
            d.std_dev = c.std_dev.unwrap_or(d.std_dev);
            d.block_len = c.block_len.unwrap_or(d.block_len);
            d.total_points = c.total_points.unwrap_or(d.total_points);
            d.mix_c1 = c.mix_c1.unwrap_or(d.mix_c1);
            cfg.cluster_seed = c.seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.random_p) {
            return Err(Error::InvalidConfig(format!(
                "random_p must lie in [0, 1], got {}",
                self.random_p
            )));
        }
        if let Horizon::Points(k) = self.k_horiz {
            if !k.is_finite() || k <= 0.0 {
                return Err(Error::InvalidConfig(format!("k_horiz must be positive, got {k}")));
            }
        }
        if self.s_buffer < 1 {
            return Err(Error::InvalidConfig("s_buffer must be at least 1".into()));
        }
        self.risk.validate()?;
        self.probe_costs.validate()?;
        self.cluster.validate()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    s_buffer: Option<usize>,
    k_horiz: Option<RawHorizon>,
    r12: Option<f64>,
    r21: Option<f64>,
    probe_cost_pos: Option<f64>,
    probe_cost_neg: Option<f64>,
    random_p: Option<f64>,
    cluster: Option<RawCluster>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawHorizon {
    Number(f64),
    Keyword(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    centers: Option<[[f64; 2]; 3]>,
    std_dev: Option<f64>,
    block_len: Option<usize>,
    total_points: Option<usize>,
    mix_c1: Option<f64>,
    seed: Option<u64>,
}

/// Where a stream comes from: `cluster` or `csv:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Cluster,
    Csv(PathBuf),
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cluster" => Ok(Dataset::Cluster),
            _ => match s.strip_prefix("csv:") {
                Some(path) if !path.is_empty() => Ok(Dataset::Csv(PathBuf::from(path))),
                _ => Err(Error::InvalidConfig(format!(
                    "dataset must be `cluster` or `csv:PATH`, got `{s}`"
                ))),
            },
        }
    }
}

impl Dataset {
    pub fn load(&self, config: &ExperimentConfig, seed: u64) -> Result<Vec<StreamPoint>> {
        match self {
            Dataset::Cluster => {
                let cluster = ClusterStreamConfig {
                    seed: config.cluster_seed.unwrap_or(seed),
                    ..config.cluster.clone()
                };
                generate_cluster_stream(&cluster)
            }
            Dataset::Csv(path) => load_csv_stream(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub probed: bool,
    pub predicted: Label,
    pub true_label: Label,
    pub probe_cost_incurred: f64,
    pub misclass_cost_incurred: f64,
    pub cumulative_cost: f64,
    pub active_size: usize,
    pub cache_size: usize,
    pub cached_ids: Vec<PointId>,
    pub recalled_ids: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub policy: String,
    pub probes: usize,
    pub total_cost: f64,
    /// Fraction of non-probed points classified correctly.
    pub accuracy: f64,
    /// Set when every point was probed; `accuracy` is then reported as 1.0.
    pub accuracy_undefined: bool,
}

/// Runs `policy` over `stream`. `seed` drives the random policy's draws.
pub fn run_experiment(
    stream: &[StreamPoint],
    policy: PolicyKind,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<(RunSummary, Vec<StepRecord>)> {
    let first = stream
        .first()
        .ok_or_else(|| Error::InvalidConfig("stream is empty".into()))?;
    config.validate()?;
    let engine = config.engine_config(stream.len());
    engine.validate()?;
    let dim = first.features.len() + 1;
    let mut state = LearnerState::new(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut records = Vec::with_capacity(stream.len());
    let (mut probe_total, mut misclass_total) = (0.0, 0.0);
    let (mut probes, mut scored, mut correct) = (0usize, 0usize, 0usize);

    for point in stream {
        let x = augment_bias(&point.features);
        let predicted = state.posterior().classify(&x)?;
        let truth = point.true_label;
        let mut oracle = |_: u64, _: &Vector| Some(truth);

        let (next, probed, cached_ids, recalled_ids) = match policy {
            PolicyKind::VoiFull => {
                let (next, d) = engine::step(&state, &x, &mut oracle, &engine)?;
                (next, d.probed.is_some(), d.cached_ids, d.recalled_ids)
            }
            PolicyKind::VopOnly => {
                let (next, probed) =
                    baseline_step(&state, &x, &mut oracle, &engine, |s| vop_only_policy(s, &x, &engine))?;
                (next, probed, Vec::new(), Vec::new())
            }
            PolicyKind::Random => {
                let (next, probed) = baseline_step(&state, &x, &mut oracle, &engine, |_| {
                    random_policy(config.random_p, &mut rng, &x)
                })?;
                (next, probed, Vec::new(), Vec::new())
            }
            PolicyKind::Uncertain => {
                let (next, probed) = baseline_step(&state, &x, &mut oracle, &engine, |s| {
                    uncertainty_policy(s.posterior(), &x)
                })?;
                (next, probed, Vec::new(), Vec::new())
            }
        };
        state = next;

        let (probe_cost, misclass_cost) = if probed {
            probes += 1;
            (config.probe_costs.actual(truth), 0.0)
        } else {
            scored += 1;
            if predicted == truth {
                correct += 1;
            }
            (0.0, config.risk.cost(truth, predicted))
        };
        probe_total += probe_cost;
        misclass_total += misclass_cost;

        records.push(StepRecord {
            step: point.index,
            probed,
            predicted,
            true_label: truth,
            probe_cost_incurred: probe_cost,
            misclass_cost_incurred: misclass_cost,
            cumulative_cost: probe_total + misclass_total,
            active_size: state.active().len(),
            cache_size: state.cache().len(),
            cached_ids,
            recalled_ids,
        });
    }

    let summary = RunSummary {
        policy: policy.name().to_string(),
        probes,
        total_cost: probe_total + misclass_total,
        accuracy: if scored == 0 {
            1.0
        } else {
            correct as f64 / scored as f64
        },
        accuracy_undefined: scored == 0,
    };
    Ok((summary, records))
}

/// Buffer, decide, maybe probe. Baselines never touch the cache.
fn baseline_step(
    state: &LearnerState,
    x: &Vector,
    oracle: &mut dyn LabelOracle,
    engine: &EngineConfig,
    decide: impl FnOnce(&LearnerState) -> Result<PolicyDecision>,
) -> Result<(LearnerState, bool)> {
    let id = state.step();
    let mut next = state.observe(x.clone(), engine.s_buffer)?;
    let decision = decide(&next)?;
    if decision.probe {
        let label = oracle.label(id, x).ok_or(Error::OracleFailure(id))?;
        next = next.with_labeled(LabeledPoint::new(id, x.clone(), label))?;
    }
    Ok((next.advance(), decision.probe))
}

pub const STEPS_HEADER: &str = "step,probed,predicted,true_label,probe_cost_incurred,misclass_cost_incurred,\
cumulative_cost,active_size,cache_size,cached_ids,recalled_ids";
pub const SUMMARY_HEADER: &str = "policy,probes,total_cost,accuracy,accuracy_undefined";

fn join_ids(ids: &[PointId]) -> String {
    ids.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(";")
}

pub fn steps_csv(records: &[StepRecord]) -> String {
    let mut out = String::from(STEPS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.probed,
            r.predicted,
            r.true_label,
            r.probe_cost_incurred,
            r.misclass_cost_incurred,
            r.cumulative_cost,
            r.active_size,
            r.cache_size,
            join_ids(&r.cached_ids),
            join_ids(&r.recalled_ids),
        );
    }
    out
}

pub fn summary_row(summary: &RunSummary) -> String {
    format!(
        "{},{},{},{},{}",
        summary.policy, summary.probes, summary.total_cost, summary.accuracy, summary.accuracy_undefined
    )
}

pub fn write_steps(records: &[StepRecord], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, steps_csv(records))?;
    Ok(())
}

/// Appends one row, writing the header first if the file is new.
pub fn append_summary(summary: &RunSummary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let fresh = !path.exists();
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{SUMMARY_HEADER}")?;
    }
    writeln!(file, "{}", summary_row(summary))?;
    Ok(())
}

/// Writes `steps.csv` and appends to `summary.csv` inside `out_dir`.
pub fn emit_outputs(summary: &RunSummary, records: &[StepRecord], out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let summary_path = out_dir.join("summary.csv");
    let steps_path = out_dir.join("steps.csv");
    append_summary(summary, &summary_path)?;
    write_steps(records, &steps_path)?;
    Ok(vec![summary_path, steps_path])
}

/// Plain-text comparison table, one row per run.
pub fn format_table(summaries: &[RunSummary]) -> String {
    let mut out = format!("{:<12}{:>8}{:>10}{:>11}\n", "METHOD", "PROBES", "COST", "ACCURACY");
    for s in summaries {
        let acc = if s.accuracy_undefined {
            "n/a".to_string()
        } else {
            format!("{:.2}%", 100.0 * s.accuracy)
        };
        let _ = writeln!(out, "{:<12}{:>8}{:>10}{:>11}", s.policy, s.probes, s.total_cost, acc);
    }
    out
}
