//! Surrogate residuals.
//!
//! For an observation `y` with conditional CDF interval `(F(y−; x), F(y; x))`
//! the surrogate `S` is uniform on that interval and the residual is
//! `R = S − 1/2`. Under a correctly specified model `S | x ~ U(0, 1)`, so the
//! centering constant is exactly 1/2 and residuals from continuous, binary and
//! ordinal outcomes live on the same scale.

use crate::data::Dataset;
use crate::dist::{normal_cdf, normal_quantile, normal_sf, Link};
use crate::error::{Error, Result};
use crate::models::{Family, FittedModel};
use crate::rng::RngStream;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest residual magnitude representable strictly inside `(−1/2, 1/2)`.
pub const RESIDUAL_BOUND: f64 = 0.499_999_999_999_999_94;

/// Default number of surrogate columns.
pub const DEFAULT_M: usize = 30;

#[inline]
fn clamp_residual(r: f64) -> f64 {
    r.clamp(-RESIDUAL_BOUND, RESIDUAL_BOUND)
}

#[inline]
fn draw_in(lo: f64, hi: f64, u: f64) -> f64 {
    if hi > lo {
        lo + (hi - lo) * u
    } else {
        hi
    }
}

/// `Φ(z) − 1/2` computed from whichever tail keeps precision.
#[inline]
fn centered_normal_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        normal_cdf(z) - 0.5
    } else {
        0.5 - normal_sf(z)
    }
}

/// One surrogate draw `S ~ U[F(y−), F(y))`. Continuous outcomes return
/// `F(y)` without touching the generator.
pub fn surrogate_draw(model: &FittedModel, y: f64, x: &[f64], stream: &RngStream) -> Result<f64> {
    let (lo, hi) = model.cdf_interval(y, x)?;
    if hi > lo {
        let u: f64 = stream.rng().random();
        Ok(draw_in(lo, hi, u))
    } else {
        Ok(hi)
    }
}

/// One residual `S − 1/2`.
pub fn residual(model: &FittedModel, y: f64, x: &[f64], stream: &RngStream) -> Result<f64> {
    if !model.spec.is_discrete() {
        model.cdf_interval(y, x)?;
        return Ok(clamp_residual(centered_normal_cdf(model.standardized(y, x))));
    }
    Ok(clamp_residual(surrogate_draw(model, y, x, stream)? - 0.5))
}

/// `n × M` residuals, stored column by column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualMatrix {
    n: usize,
    m: usize,
    values: Vec<f64>,
    stream: RngStream,
}

impl ResidualMatrix {
    pub fn from_columns(columns: Vec<Vec<f64>>, stream: RngStream) -> Result<Self> {
        let m = columns.len();
        if m == 0 {
            return Err(Error::InvalidConfig("residual matrix needs M >= 1".into()));
        }
        let n = columns[0].len();
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "column of length {} in a matrix with {n} rows",
                c.len()
            )));
        }
        Ok(ResidualMatrix {
            n,
            m,
            values: columns.concat(),
            stream,
        })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.m
    }

    pub fn column(&self, m: usize) -> &[f64] {
        &self.values[m * self.n..(m + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.m).map(move |m| self.column(m))
    }

    pub fn get(&self, i: usize, m: usize) -> f64 {
        self.values[m * self.n + i]
    }

    /// The stream the matrix was drawn from.
    pub fn stream(&self) -> &RngStream {
        &self.stream
    }
}

/// Residuals for every row of `data`, `m` surrogate columns. Column `k` draws
/// row `i` from word `i` of `stream.child(k)`.
pub fn residual_matrix(
    model: &FittedModel,
    data: &Dataset,
    m: usize,
    stream: &RngStream,
) -> Result<ResidualMatrix> {
    if m == 0 {
        return Err(Error::InvalidConfig("M must be at least 1".into()));
    }
    if data.d() != model.n_covariates() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} covariates, model expects {}",
            data.d(),
            model.n_covariates()
        )));
    }
    let n = data.n();
    if !model.spec.is_discrete() {
        let col: Vec<f64> = data
            .x
            .rows()
            .zip(&data.y)
            .map(|(x, &y)| clamp_residual(centered_normal_cdf(model.standardized(y, x))))
            .collect();
        let mut values = Vec::with_capacity(n * m);
        for _ in 0..m {
            values.extend_from_slice(&col);
        }
        return Ok(ResidualMatrix {
            n,
            m,
            values,
            stream: stream.clone(),
        });
    }
    let intervals = data
        .x
        .rows()
        .zip(&data.y)
        .map(|(x, &y)| model.cdf_interval(y, x))
        .collect::<Result<Vec<_>>>()?;
    let columns: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|k| {
            // One 64-bit word per row, consumed in row order.
            let mut rng = stream.child(k as u64).rng();
            intervals
                .iter()
                .map(|&(lo, hi)| clamp_residual(draw_in(lo, hi, rng.random()) - 0.5))
                .collect()
        })
        .collect();
    Ok(ResidualMatrix {
        n,
        m,
        values: columns.concat(),
        stream: stream.clone(),
    })
}

/// `h(r) = Φ⁻¹(r + 1/2)`, evaluated so that `h(−r) = −h(r)` exactly.
pub fn normalize(r: f64) -> Result<f64> {
    if !(r.abs() < 0.5) {
        return Err(Error::DomainError(r));
    }
    if r <= 0.0 {
        Ok(normal_quantile(0.5 + r))
    } else {
        Ok(-normal_quantile(0.5 - r))
    }
}

/// Latent-truncation residuals of a cumulative link model, mapped to the
/// uniform scale: `e` is drawn from the link distribution truncated to
/// `(α_{y−1} − η, α_y − η]`, centred by the latent mean, and returned as
/// `G(e) − 1/2` with `G` the CDF of `transform`.
pub fn lz_residuals(
    model: &FittedModel,
    data: &Dataset,
    transform: Link,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    if model.spec.family != Family::CumulativeLink {
        return Err(Error::InvalidSpec(
            "latent residuals need a cumulative link model".into(),
        ));
    }
    if data.n() == 0 {
        return Err(Error::EmptyData);
    }
    let link = model.spec.link;
    let alpha = &model.params.intercepts;
    let j = alpha.len() + 1;
    let mean = link.latent_mean();
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(data.n());
    for (x, &y) in data.x.rows().zip(&data.y) {
        let k = model.spec.category_index(y)?;
        let eta = model.linear_predictor(x);
        let a = if k == 0 { f64::NEG_INFINITY } else { alpha[k - 1] - eta };
        let b = if k + 1 == j { f64::INFINITY } else { alpha[k] - eta };
        let (ga, gb) = (link.cdf(a), link.cdf(b));
        let u: f64 = rng.random();
        let e = link.quantile(draw_in(ga, gb, u));
        let r_lz = e - mean;
        // The centring is undone before the transform so that `G` sees the
        // latent error on its own scale.
        out.push(clamp_residual(transform.cdf(r_lz + mean) - 0.5));
    }
    Ok(out)
}

/// Two-sample KS statistic between latent-truncation residuals and surrogate
/// residuals on the same data, each from its own sub-stream.
pub fn lz_equivalence_stat(model: &FittedModel, data: &Dataset, stream: &RngStream) -> Result<f64> {
    lz_equivalence_stat_with(model, data, model.spec.link, stream)
}

/// As [`lz_equivalence_stat`], transforming the latent residuals with
/// `transform` instead of the model's own link.
pub fn lz_equivalence_stat_with(
    model: &FittedModel,
    data: &Dataset,
    transform: Link,
    stream: &RngStream,
) -> Result<f64> {
    let lz = lz_residuals(model, data, transform, &stream.child(1))?;
    let sr = residual_matrix(model, data, 1, &stream.child(0))?;
    crate::ks::two_sample(&lz, sr.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Covariates;
    use crate::models::{ModelSpec, Params};
    use approx::assert_relative_eq;

    fn binary_model(p0: f64) -> FittedModel {
        // P(Y = 1) = G(b0) with no covariates; F(0) = 1 − G(b0).
        let b0 = Link::Logit.quantile(1.0 - p0);
        FittedModel::from_params(
            ModelSpec::binary(Link::Logit),
            Params {
                intercepts: vec![b0],
                beta: vec![],
                sigma: None,
                phi: vec![],
            },
        )
        .unwrap()
    }

    #[test]
    fn continuous_draw_is_deterministic() {
        let model = FittedModel::from_params(
            ModelSpec::linear(),
            Params {
                intercepts: vec![1.0],
                beta: vec![],
                sigma: Some(2.0),
                phi: vec![],
            },
        )
        .unwrap();
        let s = surrogate_draw(&model, 1.0, &[], &RngStream::new(3)).unwrap();
        assert_eq!(s, 0.5);
        assert_eq!(residual(&model, 1.0, &[], &RngStream::new(4)).unwrap(), 0.0);
    }

    #[test]
    fn binary_draws_fall_in_interval() {
        let model = binary_model(0.7);
        let root = RngStream::new(11);
        let n = 100_000;
        let mut sum = 0.0;
        for i in 0..n {
            let s = surrogate_draw(&model, 0.0, &[], &root.child(i)).unwrap();
            assert!((0.0..0.7 + 1e-12).contains(&s));
            sum += s;
        }
        // uniform mean 0.35, Monte-Carlo SE 0.7/sqrt(12 n) ≈ 6.4e-4
        assert!((sum / n as f64 - 0.35).abs() < 0.003);
        for i in 0..1000 {
            let s = surrogate_draw(&model, 1.0, &[], &root.child(i)).unwrap();
            assert!(s >= 0.7 - 1e-12 && s < 1.0);
        }
    }

    #[test]
    fn binary_residual_mean() {
        let model = binary_model(0.7);
        let data = Dataset::intercept_only(vec![0.0; 20_000]);
        let r = residual_matrix(&model, &data, 1, &RngStream::new(5)).unwrap();
        let mean = r.column(0).iter().sum::<f64>() / 20_000.0;
        assert!((mean + 0.15).abs() < 0.004, "{mean}");
    }

    #[test]
    fn equal_probability_ordinal_residual_range() {
        let spec = ModelSpec::adjacent_category(5).unwrap();
        let model = FittedModel::from_params(
            spec,
            Params {
                intercepts: vec![0.0; 4],
                beta: vec![],
                sigma: None,
                phi: vec![],
            },
        )
        .unwrap();
        let data = Dataset::intercept_only(vec![3.0; 5000]);
        let r = residual_matrix(&model, &data, 3, &RngStream::new(1)).unwrap();
        for m in 0..3 {
            for &v in r.column(m) {
                assert!(v > -0.1 - 1e-12 && v < 0.1 + 1e-12);
            }
        }
    }

    #[test]
    fn sequential_columns_match_positional_draws() {
        let model = binary_model(0.4);
        let y: Vec<f64> = (0..50).map(|i| (i % 2) as f64).collect();
        let data = Dataset::new(y.clone(), Covariates::empty(50)).unwrap();
        let stream = RngStream::new(99);
        let r = residual_matrix(&model, &data, 4, &stream).unwrap();
        for m in 0..4 {
            for (i, &yi) in y.iter().enumerate() {
                let (lo, hi) = model.cdf_interval(yi, &[]).unwrap();
                let u: f64 = stream.child(m as u64).rng_at(i as u64).random();
                assert_eq!(r.get(i, m), lo + (hi - lo) * u - 0.5);
            }
        }
    }

    #[test]
    fn normalize_values() {
        assert_eq!(normalize(0.0).unwrap(), 0.0);
        assert_relative_eq!(normalize(0.475).unwrap(), 1.959_963_984_540_054, max_relative = 1e-12);
        assert!(matches!(normalize(0.5), Err(Error::DomainError(_))));
        assert!(matches!(normalize(-0.7), Err(Error::DomainError(_))));
        for &r in &[1e-9, 0.1, 0.3, 0.49, RESIDUAL_BOUND] {
            let h = normalize(r).unwrap();
            assert!(h.is_finite());
            assert_eq!(normalize(-r).unwrap(), -h);
        }
    }

    #[test]
    fn lz_needs_cumulative_model_and_data() {
        let model = binary_model(0.5);
        let data = Dataset::intercept_only(vec![0.0, 1.0]);
        assert!(lz_equivalence_stat(&model, &data, &RngStream::new(0)).is_err());
        let spec = ModelSpec::cumulative(Link::Logit, 3).unwrap();
        let model = FittedModel::from_params(
            spec,
            Params {
                intercepts: vec![-1.0, 1.0],
                beta: vec![],
                sigma: None,
                phi: vec![],
            },
        )
        .unwrap();
        let empty = Dataset::intercept_only(vec![]);
        assert_eq!(
            lz_equivalence_stat(&model, &empty, &RngStream::new(0)),
            Err(Error::EmptyData)
        );
    }
}
