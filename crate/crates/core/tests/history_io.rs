mod common;

use common::random_instance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rem_core::io::{edgelist_rows_from_csv, read_actor_covariate, read_dyad_covariate, read_edgelist, write_edgelist};
use rem_core::{aggregate_sociomatrix, parse_edgelist, validate_covariates, Covariate, CovariateSet, EventHistory, RemError, Timing};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn csv_and_json_round_trip(seed in any::<u64>(), exact in any::<bool>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 8, 30, 1);
        let mode = if exact { Timing::Exact } else { Timing::Ordinal };
        let h = inst.history(mode);
        let mut buf = Vec::new();
        write_edgelist(&h, &mut buf).unwrap();
        let back = parse_edgelist(&edgelist_rows_from_csv(buf.as_slice()).unwrap(), h.actors(), mode).unwrap();
        prop_assert_eq!(&back, &h);
        let json = serde_json::to_string(&h).unwrap();
        let from_json: EventHistory = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(from_json, h);
    }

    #[test]
    fn sociomatrix_and_gaps(seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 8, 30, 1);
        let h = inst.history(Timing::Exact);
        let m = aggregate_sociomatrix(&h);
        prop_assert_eq!(m.iter().flatten().sum::<u64>(), h.len() as u64);
        prop_assert!((0..h.actors()).all(|i| m[i][i] == 0));
        let gaps: f64 = h.waiting_times().unwrap().iter().sum();
        prop_assert!((gaps - inst.horizon).abs() < 1e-12 * inst.horizon.max(1.0));
    }
}

fn row(t: f64, s: f64, r: f64) -> [Option<f64>; 3] {
    [Some(t), Some(s), Some(r)]
}

#[test]
fn parse_errors() {
    let unordered = [row(2.0, 1.0, 2.0), row(1.0, 2.0, 1.0)];
    assert!(matches!(parse_edgelist(&unordered, 3, Timing::Ordinal), Err(RemError::Ordering { row: 2, .. })));
    let tied = [row(0.5, 1.0, 2.0), row(0.5, 2.0, 1.0), [Some(1.0), None, None]];
    assert!(matches!(parse_edgelist(&tied, 3, Timing::Exact), Err(RemError::Simultaneity { row: 2, .. })));
    let range = [row(1.0, 1.0, 4.0)];
    assert!(matches!(parse_edgelist(&range, 3, Timing::Ordinal), Err(RemError::IdRange { row: 1, .. })));
    let missing = [[Some(1.0), None, Some(2.0)], row(2.0, 1.0, 2.0)];
    assert!(matches!(parse_edgelist(&missing, 3, Timing::Ordinal), Err(RemError::MissingValue { row: 1 })));
    let selfloop = [row(1.0, 2.0, 2.0)];
    assert!(matches!(parse_edgelist(&selfloop, 3, Timing::Ordinal), Err(RemError::SelfLoop { .. })));
    let no_horizon = [row(1.0, 1.0, 2.0), [None, None, None]];
    assert!(matches!(parse_edgelist(&no_horizon, 3, Timing::Exact), Err(RemError::MissingValue { row: 2 })));
}

#[test]
fn ordinal_first_column_is_reindexed() {
    let h = parse_edgelist(&[row(10.0, 1.0, 2.0), row(12.5, 2.0, 1.0), row(40.0, 1.0, 3.0)], 3, Timing::Ordinal).unwrap();
    let times: Vec<f64> = h.events().iter().map(|e| e.time).collect();
    assert_eq!(times, vec![1.0, 2.0, 3.0]);
}

#[test]
fn sociomatrix_by_hand() {
    let h = parse_edgelist(&[row(1.0, 1.0, 2.0), row(2.0, 1.0, 2.0), row(3.0, 2.0, 1.0)], 2, Timing::Ordinal).unwrap();
    assert_eq!(aggregate_sociomatrix(&h), vec![vec![0, 2], vec![1, 0]]);
    let empty = EventHistory::new(3, Timing::Ordinal, vec![], None).unwrap();
    assert!(aggregate_sociomatrix(&empty).iter().flatten().all(|&c| c == 0));
}

#[test]
fn files_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let el = dir.path().join("events.csv");
    std::fs::write(&el, "t,s,r\n0.135,14,12\n0.270,12,14\n50.920,NA,NA\n").unwrap();
    let h = read_edgelist(&el, 20, Timing::Exact).unwrap();
    assert_eq!(h.len(), 2);
    assert_eq!(h.horizon(), Some(50.92));

    let js = dir.path().join("events.json");
    std::fs::write(&js, "[[1,16,32],[2,32,16],[3,16,32]]").unwrap();
    let h = read_edgelist(&js, 37, Timing::Ordinal).unwrap();
    assert_eq!(h.events()[0].dyad(), (15, 31));

    let cov = dir.path().join("icr.csv");
    let body: String = (0..37).map(|i| format!("{}\n", u8::from(i % 5 == 0))).collect();
    std::fs::write(&cov, format!("icr\n{body}")).unwrap();
    let c = read_actor_covariate(&cov).unwrap();
    let set = validate_covariates(CovariateSet::new().with("CovInt", c), &h).unwrap();
    assert_eq!(set.get("CovInt").unwrap().columns(), 1);

    let short = dir.path().join("short.csv");
    std::fs::write(&short, "1\n".repeat(36)).unwrap();
    let c = read_actor_covariate(&short).unwrap();
    assert!(matches!(validate_covariates(CovariateSet::new().with("CovInt", c), &h), Err(RemError::Shape { .. })));

    let dy = dir.path().join("dyad.csv");
    let grid: String = (0..20).map(|i| (0..20).map(|j| ((i + j) % 3).to_string()).collect::<Vec<_>>().join(",") + "\n").collect();
    std::fs::write(&dy, grid).unwrap();
    let c = read_dyad_covariate(&dy, 20).unwrap();
    let h20 = EventHistory::new(20, Timing::Ordinal, vec![], None).unwrap();
    assert!(validate_covariates(CovariateSet::new().with("CovEvent", c), &h20).is_ok());
}

#[test]
fn time_varying_covariates_validate_but_do_not_bind() {
    let h = EventHistory::new(3, Timing::Ordinal, vec![rem_core::Event::new(1.0, 0, 1)], None).unwrap();
    let tv = Covariate::ActorTimeVarying { values: vec![vec![vec![1.0, 2.0, 3.0]]] };
    let set = validate_covariates(CovariateSet::new().with("CovSnd", tv), &h).unwrap();
    let spec = rem_core::EffectSpecification::parse(&["CovSnd"]).unwrap();
    assert!(matches!(rem_core::Model::bind(&spec, 3, &set), Err(RemError::UnsupportedFeature(_))));
}
