//! Kendall's tau on surrogate residuals: the association measure `𝒯`.

use crate::data::{Dataset, PairData};
use crate::error::{Error, Result};
use crate::models::{fit, FittedModel, ModelSpec};
use crate::rng::RngStream;
use crate::surrogate::{residual_matrix, ResidualMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Marginal estimates below this magnitude make the percentage change undefined.
pub const MODERATION_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssocKind {
    Marginal,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssocEstimate {
    pub t_hat: f64,
    pub m: usize,
    pub n: usize,
    pub kind: AssocKind,
    pub per_column: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModerationResult {
    pub t_partial: AssocEstimate,
    pub t_marginal: AssocEstimate,
    pub delta: f64,
    /// `None` when the marginal estimate is numerically zero.
    pub pct_change: Option<f64>,
}

fn cmp(x: &f64, y: &f64) -> Ordering {
    x.partial_cmp(y).unwrap_or(Ordering::Equal)
}

/// Number of index pairs `i < j` with `v[i] > v[j]`; sorts `v` in place.
fn count_inversions(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    buf.clear();
    buf.resize(n, 0.0);
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if v[j] < v[i] {
                    buf[k] = v[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[k] = v[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
            k += mid - i;
            buf[k..k + hi - j].copy_from_slice(&v[j..hi]);
            lo = hi;
        }
        v.copy_from_slice(buf);
        width *= 2;
    }
    swaps
}

/// `Σ t(t−1)/2` over runs of equal values in sorted `v`.
fn tied_pairs<T: PartialEq>(v: impl Iterator<Item = T>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<T> = None;
    for x in v {
        if prev.as_ref() == Some(&x) {
            run += 1;
        } else {
            total += run * run.saturating_sub(1) / 2;
            run = 1;
            prev = Some(x);
        }
    }
    total + run * run.saturating_sub(1) / 2
}

/// `Σ_{i<j} sgn(a_i − a_j) sgn(b_i − b_j)`, in `O(n log n)`.
pub fn kendall_numerator(a: &[f64], b: &[f64]) -> Result<i64> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::LengthMismatch(n, b.len()));
    }
    if let Some(&v) = a.iter().chain(b).find(|v| v.is_nan()) {
        return Err(Error::DomainError(v));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&i, &j| cmp(&a[i], &a[j]).then_with(|| cmp(&b[i], &b[j])));
    let ties_a = tied_pairs(idx.iter().map(|&i| a[i]));
    let ties_joint = tied_pairs(idx.iter().map(|&i| (a[i], b[i])));
    let mut sorted_b: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
    let mut buf = Vec::new();
    let discordant = count_inversions(&mut sorted_b, &mut buf);
    let ties_b = tied_pairs(sorted_b.iter().copied());
    let pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
    let untied = (pairs + ties_joint - ties_a - ties_b) as i64;
    Ok(untied - 2 * discordant as i64)
}

/// Kendall's tau-a: the pair-sign sum over `C(n, 2)`, ties contributing 0.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewObservations(n));
    }
    let s = kendall_numerator(a, b)?;
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok(s as f64 / pairs as f64)
}

/// Column-wise tau between two residual matrices, averaged over columns.
pub fn t_measure(r1: &ResidualMatrix, r2: &ResidualMatrix) -> Result<AssocEstimate> {
    if r1.nrows() != r2.nrows() || r1.ncols() != r2.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            r1.nrows(),
            r1.ncols(),
            r2.nrows(),
            r2.ncols()
        )));
    }
    let m = r1.ncols();
    let numerators = (0..m)
        .into_par_iter()
        .map(|k| kendall_numerator(r1.column(k), r2.column(k)))
        .collect::<Result<Vec<i64>>>()?;
    let n = r1.nrows();
    if n < 2 {
        return Err(Error::TooFewObservations(n));
    }
    let pairs = (n as i64) * (n as i64 - 1) / 2;
    let per_column: Vec<f64> = numerators.iter().map(|&s| s as f64 / pairs as f64).collect();
    // Averaging the integer numerators keeps a single rounding step.
    let total: i64 = numerators.iter().sum();
    let t_hat = total as f64 / (pairs as f64 * m as f64);
    Ok(AssocEstimate {
        t_hat,
        m,
        n: r1.nrows(),
        kind: AssocKind::Partial,
        per_column,
    })
}

/// `𝒯̂_M` from two fitted models. Outcome `k` draws its surrogates from
/// `stream.child(k)`.
pub fn t_from_models(
    model1: &FittedModel,
    data1: &Dataset,
    model2: &FittedModel,
    data2: &Dataset,
    m: usize,
    stream: &RngStream,
) -> Result<AssocEstimate> {
    let r1 = residual_matrix(model1, data1, m, &stream.child(0))?;
    let r2 = residual_matrix(model2, data2, m, &stream.child(1))?;
    t_measure(&r1, &r2)
}

/// Partial association `𝒯̂_M(Y₁, Y₂ : X)`: both outcomes regressed on the
/// pair's covariates.
pub fn partial_t(
    pair: &PairData,
    spec1: &ModelSpec,
    spec2: &ModelSpec,
    m: usize,
    stream: &RngStream,
) -> Result<AssocEstimate> {
    let (d1, d2) = (pair.first(), pair.second());
    let model1 = fit(spec1, &d1)?;
    let model2 = fit(spec2, &d2)?;
    t_from_models(&model1, &d1, &model2, &d2, m, stream)
}

/// Marginal association `𝒯̂_M(Y₁, Y₂)` from intercept-only models.
pub fn marginal_t(
    y1: &[f64],
    y2: &[f64],
    spec1: &ModelSpec,
    spec2: &ModelSpec,
    m: usize,
    stream: &RngStream,
) -> Result<AssocEstimate> {
    if y1.len() != y2.len() {
        return Err(Error::LengthMismatch(y1.len(), y2.len()));
    }
    let d1 = Dataset::intercept_only(y1.to_vec());
    let d2 = Dataset::intercept_only(y2.to_vec());
    let model1 = fit(spec1, &d1)?;
    let model2 = fit(spec2, &d2)?;
    let mut est = t_from_models(&model1, &d1, &model2, &d2, m, stream)?;
    est.kind = AssocKind::Marginal;
    Ok(est)
}

/// `(partial − marginal) / marginal × 100`.
pub fn pct_change(partial: f64, marginal: f64) -> Result<f64> {
    if marginal.abs() <= MODERATION_EPS {
        return Err(Error::UndefinedModeration);
    }
    Ok((partial - marginal) / marginal * 100.0)
}

pub fn moderation(partial: &AssocEstimate, marginal: &AssocEstimate) -> ModerationResult {
    ModerationResult {
        t_partial: partial.clone(),
        t_marginal: marginal.clone(),
        delta: partial.t_hat - marginal.t_hat,
        pct_change: pct_change(partial.t_hat, marginal.t_hat).ok(),
    }
}

/// Marginal and partial estimates on the same surrogate streams, and the
/// resulting moderation effect.
pub fn moderation_analysis(
    pair: &PairData,
    spec1: &ModelSpec,
    spec2: &ModelSpec,
    m: usize,
    stream: &RngStream,
) -> Result<ModerationResult> {
    let marginal = marginal_t(&pair.y1, &pair.y2, spec1, spec2, m, stream)?;
    let partial = partial_t(pair, spec1, spec2, m, stream)?;
    Ok(moderation(&partial, &marginal))
}
