#![allow(dead_code)]

use mixassoc::{Covariates, FittedModel, Link, ModelSpec, Params, RngStream};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn covariates(n: usize, stream: &RngStream) -> Covariates {
    let mut rng = stream.rng();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.sample::<f64, _>(StandardNormal), rng.random::<f64>()])
        .collect();
    Covariates::from_rows(&rows).unwrap()
}

fn params(intercepts: Vec<f64>, beta: Vec<f64>, sigma: Option<f64>, phi: Vec<f64>) -> Params {
    Params {
        intercepts,
        beta,
        sigma,
        phi,
    }
}

/// One generating model per family, on two covariates.
pub fn true_models() -> Vec<(&'static str, FittedModel)> {
    vec![
        (
            "linear",
            FittedModel::from_params(ModelSpec::linear(), params(vec![1.0], vec![2.0, -1.0], Some(1.5), vec![]))
                .unwrap(),
        ),
        (
            "binary logit",
            FittedModel::from_params(ModelSpec::binary(Link::Logit), params(vec![-0.3], vec![0.8, 1.2], None, vec![]))
                .unwrap(),
        ),
        (
            "cumulative logit",
            FittedModel::from_params(
                ModelSpec::cumulative(Link::Logit, 4).unwrap(),
                params(vec![-1.0, 0.2, 1.5], vec![0.7, -1.0], None, vec![]),
            )
            .unwrap(),
        ),
        (
            "cumulative probit",
            FittedModel::from_params(
                ModelSpec::cumulative(Link::Probit, 3).unwrap(),
                params(vec![-0.4, 0.6], vec![0.5, 0.8], None, vec![]),
            )
            .unwrap(),
        ),
        (
            "adjacent category",
            FittedModel::from_params(
                ModelSpec::adjacent_category(5).unwrap(),
                params(vec![-1.0, -0.5, 0.3, 1.0], vec![-0.5, 1.5], None, vec![]),
            )
            .unwrap(),
        ),
        (
            "stereotype",
            FittedModel::from_params(
                ModelSpec::stereotype(4).unwrap(),
                params(vec![0.5, 0.2, -0.4], vec![1.0, -0.8], None, vec![0.0, 0.4, 0.7, 1.0]),
            )
            .unwrap(),
        ),
    ]
}
