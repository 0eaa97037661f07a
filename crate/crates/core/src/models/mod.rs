//! Covariate-adjustment regression models and their conditional CDFs.
//!
//! Every family exposes `F(y; x, β)` through [`FittedModel::cdf_interval`], which
//! is all the surrogate residual needs. Discrete families are parameterized as
//! follows (`η = x'β`):
//!
//! | family                  | probabilities                                       |
//! |-------------------------|-----------------------------------------------------|
//! | `BinaryGlm`             | `P(Y = 1) = G(b₀ + η)`                               |
//! | `CumulativeLink`        | `P(Y ≤ j) = G(α_j − η)`, `j = 1..J−1`               |
//! | `AdjacentCategoryLogit` | `log P(Y = j) / P(Y = j+1) = α_j + η`, `j = 1..J−1` |
//! | `OrderedStereotype`     | `log P(Y = j) / P(Y = 1) = α_j + φ_j η`, `j = 2..J` |
//!
//! with `φ_1 = 0` and `φ_J = 1` pinned for the stereotype model. Binary outcomes
//! are coded `0/1`, ordinal outcomes `1..=J`.

mod discrete;
mod linear;
mod scoring;

use crate::data::{Covariates, Dataset};
use crate::dist::{normal_cdf, Link};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use scoring::{FitOptions, MAX_ITERATIONS, REL_TOLERANCE, SEPARATION_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    BinaryGlm,
    CumulativeLink,
    AdjacentCategoryLogit,
    OrderedStereotype,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Continuous,
    Binary,
    /// Ordinal with `J` categories.
    Ordinal(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    /// Ignored by the linear, adjacent-category and stereotype families.
    pub link: Link,
    pub outcome: OutcomeKind,
}

impl ModelSpec {
    pub fn new(family: Family, link: Link, outcome: OutcomeKind) -> Result<Self> {
        let spec = ModelSpec {
            family,
            link,
            outcome,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear() -> Self {
        ModelSpec {
            family: Family::Linear,
            link: Link::Probit,
            outcome: OutcomeKind::Continuous,
        }
    }

    pub fn binary(link: Link) -> Self {
        ModelSpec {
            family: Family::BinaryGlm,
            link,
            outcome: OutcomeKind::Binary,
        }
    }

    pub fn cumulative(link: Link, categories: usize) -> Result<Self> {
        Self::new(Family::CumulativeLink, link, OutcomeKind::Ordinal(categories))
    }

    pub fn adjacent_category(categories: usize) -> Result<Self> {
        Self::new(
            Family::AdjacentCategoryLogit,
            Link::Logit,
            OutcomeKind::Ordinal(categories),
        )
    }

    pub fn stereotype(categories: usize) -> Result<Self> {
        Self::new(
            Family::OrderedStereotype,
            Link::Logit,
            OutcomeKind::Ordinal(categories),
        )
    }

    pub fn validate(&self) -> Result<()> {
        match (self.family, self.outcome) {
            (Family::Linear, OutcomeKind::Continuous) => Ok(()),
            (Family::Linear, _) => Err(Error::InvalidSpec(
                "linear family requires a continuous outcome".into(),
            )),
            (_, OutcomeKind::Continuous) => Err(Error::InvalidSpec(format!(
                "{:?} requires a discrete outcome",
                self.family
            ))),
            (Family::BinaryGlm, OutcomeKind::Binary) => Ok(()),
            (Family::BinaryGlm, OutcomeKind::Ordinal(2)) => Ok(()),
            (Family::BinaryGlm, _) => Err(Error::InvalidSpec(
                "binary GLM requires exactly 2 categories".into(),
            )),
            (_, OutcomeKind::Ordinal(j)) if j >= 3 => Ok(()),
            _ => Err(Error::InvalidSpec(format!(
                "{:?} requires an ordinal outcome with at least 3 categories",
                self.family
            ))),
        }
    }

    pub fn is_discrete(&self) -> bool {
        self.family != Family::Linear
    }

    /// Number of outcome categories, `None` for continuous outcomes.
    pub fn categories(&self) -> Option<usize> {
        match self.outcome {
            OutcomeKind::Continuous => None,
            OutcomeKind::Binary => Some(2),
            OutcomeKind::Ordinal(j) => Some(j),
        }
    }

    /// Number of intercept-type parameters (cut-points, category intercepts).
    pub fn n_intercepts(&self) -> usize {
        match self.family {
            Family::Linear | Family::BinaryGlm => 1,
            _ => self.categories().unwrap_or(0) - 1,
        }
    }

    /// Number of free stereotype scores.
    pub fn n_free_scores(&self) -> usize {
        match self.family {
            Family::OrderedStereotype => self.categories().unwrap_or(2) - 2,
            _ => 0,
        }
    }

    /// Total free mean parameters for `d` covariates (σ excluded).
    pub fn n_params(&self, d: usize) -> usize {
        self.n_intercepts() + d + self.n_free_scores()
    }

    /// Zero-based category index of an outcome code.
    pub fn category_index(&self, y: f64) -> Result<usize> {
        let j = self.categories().ok_or(Error::OutOfSupport { value: y })?;
        if y.fract() != 0.0 || !y.is_finite() {
            return Err(Error::OutOfSupport { value: y });
        }
        let base = self.first_code();
        let k = y - base;
        if k < 0.0 || k >= j as f64 {
            return Err(Error::OutOfSupport { value: y });
        }
        Ok(k as usize)
    }

    /// Outcome code of a zero-based category index.
    pub fn category_code(&self, k: usize) -> f64 {
        self.first_code() + k as f64
    }

    fn first_code(&self) -> f64 {
        match self.outcome {
            OutcomeKind::Binary => 0.0,
            _ => 1.0,
        }
    }
}

/// Model parameters in their natural (named) form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Linear/binary: `[b₀]`. Cumulative and adjacent-category: `α_1..α_{J−1}`.
    /// Stereotype: `α_2..α_J`.
    pub intercepts: Vec<f64>,
    /// Slopes, one per covariate.
    pub beta: Vec<f64>,
    /// Residual scale (linear only).
    pub sigma: Option<f64>,
    /// Full stereotype score vector `φ_1..φ_J` (pinned ends included); empty otherwise.
    pub phi: Vec<f64>,
}

impl Params {
    pub(crate) fn to_theta(&self, spec: &ModelSpec) -> Result<Vec<f64>> {
        if self.intercepts.len() != spec.n_intercepts() {
            return Err(Error::DimensionMismatch(format!(
                "{} intercepts, expected {}",
                self.intercepts.len(),
                spec.n_intercepts()
            )));
        }
        let mut theta = self.intercepts.clone();
        theta.extend_from_slice(&self.beta);
        if spec.family == Family::OrderedStereotype {
            let j = spec.categories().unwrap_or(0);
            if self.phi.len() != j {
                return Err(Error::DimensionMismatch(format!(
                    "{} stereotype scores, expected {j}",
                    self.phi.len()
                )));
            }
            if self.phi[0] != 0.0 || self.phi[j - 1] != 1.0 {
                return Err(Error::InvalidSpec(
                    "stereotype scores must satisfy phi_1 = 0 and phi_J = 1".into(),
                ));
            }
            theta.extend_from_slice(&self.phi[1..j - 1]);
        }
        if spec.family == Family::Linear {
            match self.sigma {
                Some(s) if s > 0.0 && s.is_finite() => {}
                _ => return Err(Error::InvalidSpec("linear model needs sigma > 0".into())),
            }
        }
        Ok(theta)
    }

    pub(crate) fn from_theta(spec: &ModelSpec, d: usize, theta: &[f64], sigma: Option<f64>) -> Self {
        let a = spec.n_intercepts();
        let mut phi = Vec::new();
        if spec.family == Family::OrderedStereotype {
            let j = spec.categories().unwrap_or(0);
            phi.push(0.0);
            phi.extend_from_slice(&theta[a + d..a + d + j - 2]);
            phi.push(1.0);
        }
        Params {
            intercepts: theta[..a].to_vec(),
            beta: theta[a..a + d].to_vec(),
            sigma,
            phi,
        }
    }
}

/// A model with fixed parameters. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub params: Params,
    pub loglik: f64,
    pub converged: bool,
    pub n_iter: usize,
    /// Standard errors aligned with `intercepts ++ beta ++ free phi`; empty
    /// for models built from given parameters.
    pub std_errors: Vec<f64>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    theta: Vec<f64>,
}

impl FittedModel {
    /// A model with given (e.g. true, data-generating) parameters.
    pub fn from_params(spec: ModelSpec, params: Params) -> Result<Self> {
        spec.validate()?;
        let theta = params.to_theta(&spec)?;
        Ok(FittedModel {
            spec,
            params,
            loglik: f64::NAN,
            converged: false,
            n_iter: 0,
            std_errors: Vec::new(),
            warnings: Vec::new(),
            theta,
        })
    }

    pub fn n_covariates(&self) -> usize {
        self.params.beta.len()
    }

    /// Linear predictor `x'β` (slopes only).
    #[inline]
    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        dot(&self.params.beta, x)
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.params.beta.len() {
            return Err(Error::DimensionMismatch(format!(
                "covariate vector has {} entries, model expects {}",
                x.len(),
                self.params.beta.len()
            )));
        }
        Ok(())
    }

    /// Category probabilities at `x` (discrete families only).
    pub fn category_probs(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.spec.is_discrete() {
            return Err(Error::InvalidSpec(
                "category probabilities need a discrete family".into(),
            ));
        }
        self.check_x(x)?;
        let mut p = vec![0.0; self.spec.categories().unwrap_or(0)];
        discrete::probs(&self.spec, &self.theta, x, &mut p);
        Ok(p)
    }

    /// `(F(y−; x), F(y; x))`. Continuous outcomes return a degenerate interval.
    pub fn cdf_interval(&self, y: f64, x: &[f64]) -> Result<(f64, f64)> {
        self.check_x(x)?;
        if !self.spec.is_discrete() {
            let s = normal_cdf(self.standardized(y, x));
            return Ok((s, s));
        }
        let k = self.spec.category_index(y)?;
        let j = self.spec.categories().unwrap_or(0);
        let mut p = [0.0; discrete::MAX_STACK_CATEGORIES];
        let mut heap;
        let p: &mut [f64] = if j <= p.len() {
            &mut p[..j]
        } else {
            heap = vec![0.0; j];
            &mut heap
        };
        discrete::probs(&self.spec, &self.theta, x, p);
        Ok(interval_from_probs(p, k))
    }

    /// `(y − b₀ − x'β) / σ` for the linear family.
    pub fn standardized(&self, y: f64, x: &[f64]) -> f64 {
        let b0 = self.params.intercepts[0];
        let sigma = self.params.sigma.unwrap_or(1.0);
        (y - b0 - self.linear_predictor(x)) / sigma
    }

    /// Draws one outcome at `x` from the model.
    pub fn sample<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<f64> {
        self.check_x(x)?;
        if !self.spec.is_discrete() {
            let z: f64 = rng.sample(StandardNormal);
            let mu = self.params.intercepts[0] + self.linear_predictor(x);
            return Ok(mu + self.params.sigma.unwrap_or(1.0) * z);
        }
        let p = self.category_probs(x)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, pk) in p.iter().enumerate() {
            acc += pk;
            if u < acc {
                return Ok(self.spec.category_code(k));
            }
        }
        Ok(self.spec.category_code(p.len() - 1))
    }

    /// Draws a full outcome vector for the rows of `x`.
    pub fn simulate<R: Rng + ?Sized>(&self, x: &Covariates, rng: &mut R) -> Result<Vec<f64>> {
        x.rows().map(|r| self.sample(r, rng)).collect()
    }

    /// Analytic score of the log-likelihood on `data`, in the `std_errors` layout
    /// (σ excluded for the linear family).
    pub fn score(&self, data: &Dataset) -> Result<Vec<f64>> {
        if self.spec.is_discrete() {
            let problem = scoring::Problem::new(&self.spec, data);
            let all: Vec<usize> = (0..self.theta.len()).collect();
            let eval = problem.evaluate(&self.theta, &all)?;
            Ok(eval.score)
        } else {
            Ok(linear::score(self, data))
        }
    }
}

/// Running partial sums of `p` up to category `k`; the top of the support is 1.
pub(crate) fn interval_from_probs(p: &[f64], k: usize) -> (f64, f64) {
    let mut lo = 0.0;
    for pk in &p[..k] {
        lo += pk;
    }
    let hi = if k + 1 == p.len() { 1.0 } else { lo + p[k] };
    (lo.min(1.0), hi.min(1.0))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Maximum-likelihood fit of `spec` to `data`.
pub fn fit(spec: &ModelSpec, data: &Dataset) -> Result<FittedModel> {
    fit_with(spec, data, &FitOptions::default())
}

pub fn fit_with(spec: &ModelSpec, data: &Dataset, opts: &FitOptions) -> Result<FittedModel> {
    spec.validate()?;
    let n = data.n();
    let d = data.d();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let params = spec.n_params(d);
    if n <= params {
        return Err(Error::InsufficientData { n, params });
    }
    if spec.is_discrete() {
        check_codes(spec, &data.y)?;
        linear::check_full_rank(&data.x)?;
        scoring::fit_discrete(spec, data, opts)
    } else {
        linear::fit_linear(spec, data)
    }
}

/// Log-likelihood of `params` on `data`.
pub fn loglik_at(spec: &ModelSpec, params: &Params, data: &Dataset) -> Result<f64> {
    spec.validate()?;
    if params.beta.len() != data.d() {
        return Err(Error::DimensionMismatch(format!(
            "{} slopes for {} covariates",
            params.beta.len(),
            data.d()
        )));
    }
    let theta = params.to_theta(spec)?;
    if spec.is_discrete() {
        scoring::Problem::new(spec, data).loglik_checked(&theta)
    } else {
        linear::loglik(params, data)
    }
}

fn check_codes(spec: &ModelSpec, y: &[f64]) -> Result<()> {
    let j = spec.categories().unwrap_or(0);
    let mut seen = vec![false; j];
    for &v in y {
        seen[spec.category_index(v)?] = true;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::EmptyCategory {
            category: spec.category_code(k) as usize,
        });
    }
    Ok(())
}
