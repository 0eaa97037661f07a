//! Comparison methods: percentage change of regression coefficients and the
//! likelihood-ratio test for partial independence.

use super::{observed_levels, power::ordinal_spec_for};
use crate::data::{Covariates, Dataset};
use crate::error::{Error, Result};
use crate::models::{fit, ModelSpec};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Linear model for the continuous outcome on ordinal-level dummies.
    ContinuousAsResponse,
    /// Adjacent-category model for the ordinal outcome on the continuous one.
    OrdinalAsResponse,
}

/// Dummy columns for ordinal levels `2..=J` (level 1 is the baseline).
fn level_dummies(codes: &[f64], levels: usize) -> Covariates {
    let n = codes.len();
    let d = levels - 1;
    let mut values = vec![0.0; n * d];
    for (i, &c) in codes.iter().enumerate() {
        let k = c as usize;
        if k >= 2 {
            values[i * d + k - 2] = 1.0;
        }
    }
    Covariates::new(n, d, values).expect("dummy matrix shape")
}

fn pct(partial: f64, marginal: f64) -> Result<f64> {
    crate::assoc::pct_change(partial, marginal)
}

/// Percentage change of the association coefficient(s) when the covariates
/// are added to the regression. For [`Direction::ContinuousAsResponse`] the
/// changes of the level dummies are averaged.
pub fn coef_change_baseline(
    continuous: &[f64],
    ordinal: &[f64],
    x: &Covariates,
    direction: Direction,
) -> Result<f64> {
    let (codes, levels) = observed_levels(ordinal)?;
    if levels < 2 {
        return Err(Error::InvalidConfig("ordinal outcome has a single level".into()));
    }
    match direction {
        Direction::ContinuousAsResponse => {
            let dummies = level_dummies(&codes, levels);
            let spec = ModelSpec::linear();
            let marginal = fit(&spec, &Dataset::new(continuous.to_vec(), dummies.clone())?)?;
            let partial = fit(&spec, &Dataset::new(continuous.to_vec(), dummies.hstack(x)?)?)?;
            let changes = (0..levels - 1)
                .map(|k| pct(partial.params.beta[k], marginal.params.beta[k]))
                .collect::<Result<Vec<_>>>()?;
            Ok(changes.iter().sum::<f64>() / changes.len() as f64)
        }
        Direction::OrdinalAsResponse => {
            let spec = ordinal_spec_for(levels)?;
            let y = if levels == 2 { codes.iter().map(|c| c - 1.0).collect() } else { codes };
            let w = Covariates::from_columns(&[continuous.to_vec()])?;
            let marginal = fit(&spec, &Dataset::new(y.clone(), w.clone())?)?;
            let partial = fit(&spec, &Dataset::new(y, w.hstack(x)?)?)?;
            pct(partial.params.beta[0], marginal.params.beta[0])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrtResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub loglik_null: f64,
    pub loglik_full: f64,
}

/// Gaussian likelihood-ratio test of `Y₂ ~ X` against `Y₂ ~ dummies(Y₁) + X`.
/// Dummies for levels that do not occur are left out, so `df` is the number of
/// observed levels minus one.
pub fn lrt_partial(continuous: &[f64], ordinal: &[f64], x: &Covariates) -> Result<LrtResult> {
    let (codes, levels) = observed_levels(ordinal)?;
    let spec = ModelSpec::linear();
    let null = fit(&spec, &Dataset::new(continuous.to_vec(), x.clone())?)?;
    if levels < 2 {
        return Ok(LrtResult {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
            loglik_null: null.loglik,
            loglik_full: null.loglik,
        });
    }
    let design = level_dummies(&codes, levels).hstack(x)?;
    let full = fit(&spec, &Dataset::new(continuous.to_vec(), design)?)?;
    let df = levels - 1;
    let statistic = (2.0 * (full.loglik - null.loglik)).max(0.0);
    let chi = ChiSquared::new(df as f64).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(LrtResult {
        statistic,
        df,
        p_value: chi.sf(statistic),
        loglik_null: null.loglik,
        loglik_full: full.loglik,
    })
}
