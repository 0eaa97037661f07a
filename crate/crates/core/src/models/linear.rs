//! Gaussian linear model, fitted in closed form.

use super::{dot, FittedModel, ModelSpec, Params};
use crate::data::{Covariates, Dataset};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Smallest admissible eigenvalue of the covariate correlation matrix.
const RANK_TOLERANCE: f64 = 1e-10;

fn column_means(x: &Covariates) -> Vec<f64> {
    let d = x.ncols();
    let mut means = vec![0.0; d];
    for r in x.rows() {
        for (m, v) in means.iter_mut().zip(r) {
            *m += v;
        }
    }
    let n = x.nrows() as f64;
    means.iter_mut().for_each(|m| *m /= n);
    means
}

/// Cross-product of the centered covariates.
fn centered_gram(x: &Covariates, means: &[f64]) -> DMatrix<f64> {
    let d = x.ncols();
    let mut g = DMatrix::<f64>::zeros(d, d);
    let mut c = vec![0.0; d];
    for r in x.rows() {
        for k in 0..d {
            c[k] = r[k] - means[k];
        }
        for a in 0..d {
            for b in a..d {
                g[(a, b)] += c[a] * c[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            g[(a, b)] = g[(b, a)];
        }
    }
    g
}

/// Errors unless `[1, X]` has full column rank.
pub(crate) fn check_full_rank(x: &Covariates) -> Result<()> {
    let d = x.ncols();
    if d == 0 {
        return Ok(());
    }
    let means = column_means(x);
    let g = centered_gram(x, &means);
    let scale: Vec<f64> = (0..d).map(|k| g[(k, k)].sqrt()).collect();
    if scale.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::RankDeficientDesign);
    }
    let corr = DMatrix::from_fn(d, d, |a, b| g[(a, b)] / (scale[a] * scale[b]));
    let min_eig = corr
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig < RANK_TOLERANCE {
        return Err(Error::RankDeficientDesign);
    }
    Ok(())
}

pub(crate) fn fit_linear(spec: &ModelSpec, data: &Dataset) -> Result<FittedModel> {
    check_full_rank(&data.x)?;
    let n = data.n();
    let d = data.d();
    let means = column_means(&data.x);
    let ybar = data.y.iter().sum::<f64>() / n as f64;

    let beta = if d > 0 {
        let g = centered_gram(&data.x, &means);
        let mut rhs = DVector::zeros(d);
        for (r, &y) in data.x.rows().zip(&data.y) {
            let yc = y - ybar;
            for k in 0..d {
                rhs[k] += (r[k] - means[k]) * yc;
            }
        }
        let ch = g.cholesky().ok_or(Error::RankDeficientDesign)?;
        ch.solve(&rhs).as_slice().to_vec()
    } else {
        Vec::new()
    };
    let b0 = ybar - dot(&beta, &means);

    let rss: f64 = data
        .x
        .rows()
        .zip(&data.y)
        .map(|(r, &y)| {
            let e = y - b0 - dot(&beta, r);
            e * e
        })
        .sum();
    let sigma = (rss / n as f64).sqrt();
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonFiniteLikelihood { row: 0 });
    }
    let params = Params {
        intercepts: vec![b0],
        beta,
        sigma: Some(sigma),
        phi: Vec::new(),
    };
    let loglik = loglik(&params, data)?;
    let std_errors = standard_errors(&data.x, sigma);
    let theta = params.to_theta(spec)?;
    Ok(FittedModel {
        spec: *spec,
        params,
        loglik,
        converged: true,
        n_iter: 1,
        std_errors,
        warnings: Vec::new(),
        theta,
    })
}

fn standard_errors(x: &Covariates, sigma: f64) -> Vec<f64> {
    let d = x.ncols();
    let mut g = DMatrix::<f64>::zeros(d + 1, d + 1);
    let mut z = vec![1.0; d + 1];
    for r in x.rows() {
        z[1..].copy_from_slice(r);
        for a in 0..=d {
            for b in 0..=d {
                g[(a, b)] += z[a] * z[b];
            }
        }
    }
    match g.cholesky() {
        Some(ch) => {
            let inv = ch.inverse();
            (0..=d).map(|k| sigma * inv[(k, k)].sqrt()).collect()
        }
        None => vec![f64::NAN; d + 1],
    }
}

pub(crate) fn loglik(params: &Params, data: &Dataset) -> Result<f64> {
    let sigma = params
        .sigma
        .filter(|s| *s > 0.0 && s.is_finite())
        .ok_or_else(|| Error::InvalidSpec("linear model needs sigma > 0".into()))?;
    let b0 = params.intercepts[0];
    let c = -0.5 * (2.0 * PI).ln() - sigma.ln();
    let mut total = 0.0;
    for (i, (r, &y)) in data.x.rows().zip(&data.y).enumerate() {
        let z = (y - b0 - dot(&params.beta, r)) / sigma;
        let term = c - 0.5 * z * z;
        if !term.is_finite() {
            return Err(Error::NonFiniteLikelihood { row: i });
        }
        total += term;
    }
    Ok(total)
}

/// Score with respect to `[b₀, β]` at fixed σ.
pub(crate) fn score(model: &FittedModel, data: &Dataset) -> Vec<f64> {
    let d = data.d();
    let sigma = model.params.sigma.unwrap_or(1.0);
    let s2 = sigma * sigma;
    let mut out = vec![0.0; d + 1];
    for (r, &y) in data.x.rows().zip(&data.y) {
        let e = (y - model.params.intercepts[0] - dot(&model.params.beta, r)) / s2;
        out[0] += e;
        for k in 0..d {
            out[k + 1] += e * r[k];
        }
    }
    out
}
