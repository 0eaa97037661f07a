//! Pairs bootstrap for `𝒯̂_M` and for moderation effects.
//!
//! Replicate `b` owns the stream `seed / b / attempt`: sub-stream 0 drives the
//! row resample and sub-stream 1 the surrogate draws, so the replicate vector
//! does not depend on how the work is scheduled.

use crate::assoc::{marginal_t, partial_t, pct_change, t_from_models};
use crate::data::PairData;
use crate::error::{Error, Result};
use crate::models::{fit, ModelSpec};
use crate::rng::RngStream;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest tolerated share of dropped replicates.
pub const MAX_FAILURE_RATE: f64 = 0.01;
/// Fewest replicates accepted by the p-value queries.
pub const MIN_REPLICATES_FOR_P: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub b: usize,
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
    pub max_refit_retries: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            b: 1000,
            m: crate::surrogate::DEFAULT_M,
            alpha: 0.05,
            seed: 0,
            max_refit_retries: 5,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if self.b < 2 {
            return Err(Error::InvalidConfig(format!("B = {} is too small", self.b)));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("M must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDistribution {
    /// Replicate estimates in replicate order.
    pub replicates: Vec<f64>,
    /// Resamples dropped after exhausting their retries.
    pub failures: usize,
    pub target: String,
    #[serde(skip)]
    sorted: Vec<f64>,
}

impl BootstrapDistribution {
    pub fn new(replicates: Vec<f64>, failures: usize, target: impl Into<String>) -> Self {
        let mut sorted = replicates.clone();
        sorted.sort_by(f64::total_cmp);
        BootstrapDistribution {
            replicates,
            failures,
            target: target.into(),
            sorted,
        }
    }

    pub fn len(&self) -> usize {
        self.replicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicates.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{replicates ≤ t} / B`.
    pub fn ecdf(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= t);
        count as f64 / self.sorted.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.replicates.iter().sum::<f64>() / self.replicates.len() as f64
    }

    /// Sample standard deviation (divisor `B − 1`).
    pub fn sd(&self) -> f64 {
        // shifted by the first replicate, so constant input gives exactly 0
        let b = self.replicates.len() as f64;
        let k = self.replicates[0];
        let (s, ss) = self
            .replicates
            .iter()
            .fold((0.0, 0.0), |(s, ss), v| (s + (v - k), ss + (v - k) * (v - k)));
        ((ss - s * s / b) / (b - 1.0)).max(0.0).sqrt()
    }

    /// Inverse-ECDF quantile, averaging the two order statistics where the
    /// ECDF is flat at `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let s = &self.sorted;
        let b = s.len();
        let np = b as f64 * p;
        let k = np.round();
        if (np - k).abs() < 1e-9 * b as f64 {
            let k = k as usize;
            if k == 0 {
                return s[0];
            }
            if k >= b {
                return s[b - 1];
            }
            return 0.5 * (s[k - 1] + s[k]);
        }
        s[(np.ceil() as usize).clamp(1, b) - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub estimate_mean: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub fn summarize(dist: &BootstrapDistribution, alpha: f64) -> Result<Summary> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if dist.len() < 2 {
        return Err(Error::TooFewObservations(dist.len()));
    }
    Ok(Summary {
        estimate_mean: dist.mean(),
        se: dist.sd(),
        ci_lo: dist.quantile(alpha / 2.0),
        ci_hi: dist.quantile(1.0 - alpha / 2.0),
    })
}

fn check_p_size(dist: &BootstrapDistribution) -> Result<()> {
    if dist.len() < MIN_REPLICATES_FOR_P {
        return Err(Error::TooFewObservations(dist.len()));
    }
    Ok(())
}

/// `2 min{F̂(0), 1 − F̂(0)}` for `H₀: 𝒯 = 0`.
pub fn p_value_simple(dist: &BootstrapDistribution) -> Result<f64> {
    check_p_size(dist)?;
    let f0 = dist.ecdf(0.0);
    Ok((2.0 * f0.min(1.0 - f0)).clamp(0.0, 1.0))
}

/// `2 min{F̂(δ), F̂(−δ)}` for `H₀: |𝒯| < δ`.
pub fn p_value_composite(dist: &BootstrapDistribution, delta: f64) -> Result<f64> {
    check_p_size(dist)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidConfig(format!("delta must be >= 0, got {delta}")));
    }
    Ok((2.0 * dist.ecdf(delta).min(dist.ecdf(-delta))).clamp(0.0, 1.0))
}

/// Row indices drawn uniformly with replacement.
pub fn resample_indices(n: usize, stream: &RngStream) -> Vec<usize> {
    let mut rng = stream.rng();
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

enum Outcome {
    Value(f64),
    Dropped,
}

/// Runs `stat` on `cfg.b` pairs-bootstrap resamples. A resample whose statistic
/// fails is redrawn up to `cfg.max_refit_retries` times, then dropped.
/// `UndefinedModeration` drops the replicate immediately.
pub fn bootstrap_with<F>(
    pair: &PairData,
    cfg: &BootstrapConfig,
    target: &str,
    stat: F,
) -> Result<BootstrapDistribution>
where
    F: Fn(&PairData, &RngStream) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let n = pair.n();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let root = RngStream::new(cfg.seed);
    let outcomes: Vec<Outcome> = (0..cfg.b)
        .into_par_iter()
        .map(|b| {
            for attempt in 0..=cfg.max_refit_retries {
                let stream = root.child(b as u64).child(attempt as u64);
                let idx = resample_indices(n, &stream.child(0));
                let sample = pair.resample(&idx);
                match stat(&sample, &stream.child(1)) {
                    Ok(v) if v.is_finite() => return Outcome::Value(v),
                    Err(Error::UndefinedModeration) => return Outcome::Dropped,
                    _ => continue,
                }
            }
            Outcome::Dropped
        })
        .collect();
    let mut replicates = Vec::with_capacity(cfg.b);
    let mut failures = 0;
    for o in outcomes {
        match o {
            Outcome::Value(v) => replicates.push(v),
            Outcome::Dropped => failures += 1,
        }
    }
    let allowed = (MAX_FAILURE_RATE * cfg.b as f64).floor() as usize;
    if failures > allowed {
        return Err(Error::TooManyFailures {
            failures,
            requested: cfg.b,
            allowed,
        });
    }
    Ok(BootstrapDistribution::new(replicates, failures, target))
}

fn target_name(what: &str, spec1: &ModelSpec, spec2: &ModelSpec, d: usize) -> String {
    format!(
        "{what}: {:?}/{:?} vs {:?}/{:?}, {d} covariates",
        spec1.family, spec1.link, spec2.family, spec2.link
    )
}

/// Bootstrap distribution of the partial `𝒯̂_M`, adjusting for all of `pair.x`.
/// Both models are fitted to the full sample first so that a hopeless
/// specification fails before any resampling.
pub fn bootstrap_t(
    pair: &PairData,
    spec1: &ModelSpec,
    spec2: &ModelSpec,
    cfg: &BootstrapConfig,
) -> Result<BootstrapDistribution> {
    cfg.validate()?;
    fit(spec1, &pair.first())?;
    fit(spec2, &pair.second())?;
    let target = target_name("partial T", spec1, spec2, pair.x.ncols());
    bootstrap_with(pair, cfg, &target, |sample, stream| {
        let (d1, d2) = (sample.first(), sample.second());
        let m1 = fit(spec1, &d1)?;
        let m2 = fit(spec2, &d2)?;
        Ok(t_from_models(&m1, &d1, &m2, &d2, cfg.m, stream)?.t_hat)
    })
}

/// Bootstrap distribution of the marginal `𝒯̂_M` (no covariates).
pub fn bootstrap_marginal_t(
    pair: &PairData,
    spec1: &ModelSpec,
    spec2: &ModelSpec,
    cfg: &BootstrapConfig,
) -> Result<BootstrapDistribution> {
    cfg.validate()?;
    marginal_t(&pair.y1, &pair.y2, spec1, spec2, 1, &RngStream::new(cfg.seed))?;
    let target = target_name("marginal T", spec1, spec2, 0);
    bootstrap_with(pair, cfg, &target, |sample, stream| {
        Ok(marginal_t(&sample.y1, &sample.y2, spec1, spec2, cfg.m, stream)?.t_hat)
    })
}

/// Bootstrap distribution of the percentage change between partial and
/// marginal `𝒯̂_M`, both computed on the same resample and surrogate streams.
pub fn bootstrap_moderation(
    pair: &PairData,
    spec1: &ModelSpec,
    spec2: &ModelSpec,
    cfg: &BootstrapConfig,
) -> Result<BootstrapDistribution> {
    cfg.validate()?;
    fit(spec1, &pair.first())?;
    fit(spec2, &pair.second())?;
    let target = target_name("moderation %", spec1, spec2, pair.x.ncols());
    bootstrap_with(pair, cfg, &target, |sample, stream| {
        let marginal = marginal_t(&sample.y1, &sample.y2, spec1, spec2, cfg.m, stream)?;
        let partial = partial_t(sample, spec1, spec2, cfg.m, stream)?;
        pct_change(partial.t_hat, marginal.t_hat)
    })
}

/// Difference in moderation percentage between two independent cohorts.
/// Each cohort is bootstrapped on its own stream and the replicates are
/// differenced index by index; the cohort-`b` stream is derived from
/// `cfg.seed` so the same data passed twice still gives independent draws.
pub fn bootstrap_moderation_difference(
    cohort_a: &PairData,
    cohort_b: &PairData,
    spec1: &ModelSpec,
    spec2: &ModelSpec,
    cfg: &BootstrapConfig,
) -> Result<BootstrapDistribution> {
    let cfg_b = BootstrapConfig {
        seed: RngStream::new(cfg.seed).child(u64::MAX).rng().random(),
        ..cfg.clone()
    };
    let a = bootstrap_moderation(cohort_a, spec1, spec2, cfg)?;
    let b = bootstrap_moderation(cohort_b, spec1, spec2, &cfg_b)?;
    let len = a.len().min(b.len());
    let diffs: Vec<f64> = a.replicates[..len]
        .iter()
        .zip(&b.replicates[..len])
        .map(|(x, y)| x - y)
        .collect();
    let failures = cfg.b - len;
    Ok(BootstrapDistribution::new(
        diffs,
        failures,
        format!("difference of {}", a.target),
    ))
}
