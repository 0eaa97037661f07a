mod common;

use mixassoc::{
    kendall_tau, marginal_t, partial_t, Covariates, FittedModel, Link, ModelSpec, PairData, Params,
    RngStream,
};
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn continuous_marginal_t_is_kendall_tau_of_the_outcomes() {
    let mut rng = RngStream::new(1).rng();
    let y1: Vec<f64> = (0..300).map(|_| rng.sample(StandardNormal)).collect();
    let y2: Vec<f64> = y1.iter().map(|v| v * v + rng.sample::<f64, _>(StandardNormal)).collect();
    let spec = ModelSpec::linear();
    let est = marginal_t(&y1, &y2, &spec, &spec, 5, &RngStream::new(2)).unwrap();
    let tau = kendall_tau(&y1, &y2).unwrap();
    assert_eq!(est.t_hat, tau);
    assert!(est.per_column.iter().all(|&t| t == tau));
}

#[test]
fn mixed_marginal_t_matches_tau_with_zero_ties() {
    let n = 500;
    let mut rng = RngStream::new(3).rng();
    let y1: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let y2: Vec<f64> = y1
        .iter()
        .map(|&v| {
            let z = v + rng.sample::<f64, _>(StandardNormal);
            1.0 + (z > -0.8) as u8 as f64 + (z > 0.3) as u8 as f64 + (z > 1.2) as u8 as f64
        })
        .collect();
    let ordinal = ModelSpec::cumulative(Link::Logit, 4).unwrap();
    let est = marginal_t(&y1, &y2, &ModelSpec::linear(), &ordinal, 200, &RngStream::new(4)).unwrap();
    let tau = kendall_tau(&y1, &y2).unwrap();
    assert!((est.t_hat - tau).abs() < 0.01, "{} vs {tau}", est.t_hat);
}

fn conditionally_independent_pair(n: usize, stream: &RngStream) -> PairData {
    let x = common::covariates(n, &stream.child(0));
    let ordinal = FittedModel::from_params(
        ModelSpec::adjacent_category(4).unwrap(),
        Params {
            intercepts: vec![-0.5, 0.0, 0.5],
            beta: vec![-1.0, 1.0],
            sigma: None,
            phi: vec![],
        },
    )
    .unwrap();
    let y1 = ordinal.simulate(&x, &mut stream.child(1).rng()).unwrap();
    let mut rng = stream.child(2).rng();
    let y2 = x
        .rows()
        .map(|r| 2.0 * r[0] - r[1] + rng.sample::<f64, _>(StandardNormal))
        .collect();
    PairData::new(y1, y2, x).unwrap()
}

#[test]
fn conditional_independence_gives_small_partial_t() {
    let n = 300;
    let spec1 = ModelSpec::adjacent_category(4).unwrap();
    let spec2 = ModelSpec::linear();
    let bound = 3.0 / (n as f64).sqrt();
    let root = RngStream::new(5);
    let mut marginal_large = 0;
    for seed in 0..200 {
        let pair = conditionally_independent_pair(n, &root.child(seed));
        let t = partial_t(&pair, &spec1, &spec2, 30, &root.child(seed).child(9)).unwrap();
        assert!(t.t_hat.abs() < bound, "seed {seed}: t = {}", t.t_hat);
        if seed < 10 {
            let m = marginal_t(&pair.y1, &pair.y2, &spec1, &spec2, 30, &root.child(seed).child(9)).unwrap();
            marginal_large += (m.t_hat.abs() > bound) as usize;
        }
    }
    // The shared covariates do induce marginal association.
    assert_eq!(marginal_large, 10);
}

#[test]
fn partial_t_is_deterministic_and_schedule_free() {
    let pair = conditionally_independent_pair(200, &RngStream::new(6));
    let spec1 = ModelSpec::adjacent_category(4).unwrap();
    let spec2 = ModelSpec::linear();
    let a = partial_t(&pair, &spec1, &spec2, 30, &RngStream::new(7)).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| partial_t(&pair, &spec1, &spec2, 30, &RngStream::new(7)).unwrap());
    assert_eq!(a, b);
}

#[test]
fn partial_t_adjusts_for_covariates() {
    // With no covariates the partial and marginal estimates coincide.
    let pair = conditionally_independent_pair(200, &RngStream::new(8));
    let bare = PairData::new(pair.y1.clone(), pair.y2.clone(), Covariates::empty(200)).unwrap();
    let spec1 = ModelSpec::adjacent_category(4).unwrap();
    let spec2 = ModelSpec::linear();
    let p = partial_t(&bare, &spec1, &spec2, 10, &RngStream::new(9)).unwrap();
    let m = marginal_t(&bare.y1, &bare.y2, &spec1, &spec2, 10, &RngStream::new(9)).unwrap();
    assert_eq!(p.t_hat, m.t_hat);
}
