use proptest::prelude::*;
use voi_learn::stream::{generate_cluster_stream, load_csv_stream, parse_csv_stream, to_csv};
use voi_learn::{ClusterStreamConfig, Error, Label};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn negative_source_switches_every_block() {
    let cfg = ClusterStreamConfig {
        block_len: 20,
        total_points: 60,
        mix_c1: 0.0,
        ..ClusterStreamConfig::default()
    };
    let points = generate_cluster_stream(&cfg).unwrap();
    for p in &points {
        let expected = match p.index {
            0..=19 | 40..=59 => 1,
            _ => 2,
        };
        assert_eq!(p.cluster, Some(expected));
        assert_eq!(p.true_label, Label::Negative);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_is_deterministic_and_regime_consistent(
        seed in any::<u64>(),
        block_len in 1usize..30,
        total in 0usize..150,
        mix in 0.0f64..=1.0,
    ) {
        let cfg = ClusterStreamConfig {
            seed,
            block_len,
            total_points: total,
            mix_c1: mix,
            ..ClusterStreamConfig::default()
        };
        let a = generate_cluster_stream(&cfg).unwrap();
        let b = generate_cluster_stream(&cfg).unwrap();
        prop_assert_eq!(to_csv(&a), to_csv(&b));
        prop_assert_eq!(a.len(), total);
        for p in &a {
            let cluster = p.cluster.unwrap();
            prop_assert_eq!(p.true_label == Label::Positive, cluster == 0);
            if cluster != 0 {
                prop_assert_eq!(cluster, cfg.negative_cluster(p.index as usize));
            }
        }
    }

    #[test]
    fn csv_round_trip_is_exact(seed in any::<u64>(), total in 1usize..40) {
        let cfg = ClusterStreamConfig { seed, total_points: total, ..ClusterStreamConfig::default() };
        let points = generate_cluster_stream(&cfg).unwrap();
        let parsed = parse_csv_stream(&to_csv(&points)).unwrap();
        prop_assert_eq!(parsed.len(), points.len());
        for (p, q) in points.iter().zip(&parsed) {
            prop_assert_eq!(&p.features, &q.features);
            prop_assert_eq!(p.true_label, q.true_label);
            prop_assert_eq!(p.index, q.index);
        }
    }
}

#[test]
fn fixture_loads() {
    let points = load_csv_stream(fixture("asym_stream.csv")).unwrap();
    assert!(points.len() >= 100);
    assert!(points.iter().all(|p| p.features.len() == 2 && p.cluster.is_none()));
    assert!(points.iter().any(|p| p.true_label == Label::Positive));
    assert!(points.iter().any(|p| p.true_label == Label::Negative));
}

#[test]
fn csv_tolerates_comments_and_crlf() {
    let text = "# exported\r\nf1,f2,label\r\n0.5,-1,+1\r\n# gap\r\n\r\n2,3e-1,-1\r\n";
    let points = parse_csv_stream(text).unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[1].features[1], 0.3);
    assert_eq!(points[1].index, 1);
}

#[test]
fn csv_errors_name_the_line() {
    assert!(matches!(
        parse_csv_stream("f1,f2,label\n1,2,+1\n1,+1\n"),
        Err(Error::DimensionInconsistent {
            line: 3,
            expected: 2,
            found: 1
        })
    ));
    assert!(matches!(
        parse_csv_stream("f1,label\n1,yes\n"),
        Err(Error::InvalidLabel { line: 2, .. })
    ));
    assert!(matches!(
        parse_csv_stream("f1,label\nabc,+1\n"),
        Err(Error::Parse { line: 2, .. })
    ));
    assert!(matches!(
        parse_csv_stream("f1,f2\n1,2\n"),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(
        load_csv_stream(fixture("missing.csv")),
        Err(Error::FileNotFound(_))
    ));
}
