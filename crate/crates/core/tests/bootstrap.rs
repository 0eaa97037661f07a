use mixassoc::inference::bootstrap_moderation_difference;
use mixassoc::simgen::{gen_wellbeing, WellbeingScenario};
use mixassoc::{
    bootstrap_moderation, bootstrap_t, p_value_simple, summarize, BootstrapConfig, Covariates, Error, ModelSpec,
    PairData, RngStream,
};

fn small_wellbeing(n: usize, seed: u64) -> PairData {
    gen_wellbeing(&WellbeingScenario::default().with_n(n), &RngStream::new(seed)).unwrap()
}

fn specs() -> (ModelSpec, ModelSpec) {
    (ModelSpec::linear(), ModelSpec::adjacent_category(5).unwrap())
}

#[test]
fn fixed_seed_reproduces_the_distribution() {
    let pair = small_wellbeing(400, 1);
    let (s1, s2) = specs();
    let cfg = BootstrapConfig {
        b: 120,
        m: 5,
        seed: 42,
        ..BootstrapConfig::default()
    };
    let a = bootstrap_t(&pair, &s1, &s2, &cfg).unwrap();
    let b = bootstrap_t(&pair, &s1, &s2, &cfg).unwrap();
    assert_eq!(a.replicates, b.replicates);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let other = bootstrap_t(&pair, &s1, &s2, &BootstrapConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(a.replicates, other.replicates);
    let s = summarize(&a, 0.05).unwrap();
    assert!(s.ci_lo < s.estimate_mean && s.estimate_mean < s.ci_hi);
    assert!(p_value_simple(&a).unwrap() < 0.05);
}

#[test]
fn degenerate_resamples_exhaust_the_failure_budget() {
    let pair = PairData::new(
        vec![1.0, 2.0, 3.0, 4.0, 5.0],
        vec![0.3, -1.2, 0.8, 2.0, -0.4],
        Covariates::empty(5),
    )
    .unwrap();
    let cfg = BootstrapConfig {
        b: 100,
        m: 2,
        seed: 1,
        ..BootstrapConfig::default()
    };
    let err = bootstrap_t(&pair, &ModelSpec::adjacent_category(5).unwrap(), &ModelSpec::linear(), &cfg).unwrap_err();
    match err {
        Error::TooManyFailures { failures, requested, allowed } => {
            assert_eq!(requested, 100);
            assert_eq!(allowed, 1);
            assert!(failures > allowed);
        }
        e => panic!("unexpected error {e:?}"),
    }
}

#[test]
fn identical_cohorts_show_no_difference() {
    let pair = small_wellbeing(500, 2);
    let (s1, s2) = specs();
    let cfg = BootstrapConfig {
        b: 200,
        m: 5,
        seed: 9,
        ..BootstrapConfig::default()
    };
    let diff = bootstrap_moderation_difference(&pair, &pair, &s1, &s2, &cfg).unwrap();
    assert_eq!(diff.len(), 200);
    let p = p_value_simple(&diff).unwrap();
    assert!(p > 0.5, "p = {p}");
    let single = bootstrap_moderation(&pair, &s1, &s2, &cfg).unwrap();
    assert!(single.mean() < 0.0);
}
