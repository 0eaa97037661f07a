//! The JSON analysis configuration.

use crate::error::{CliError, Result};
use mixassoc::{BootstrapConfig, Family, Link, ModelSpec, OutcomeKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Continuous,
    Binary,
    Ordinal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeConfig {
    pub column: String,
    pub kind: Kind,
    /// Defaults: `linear` for continuous, `binary_glm` for binary and
    /// `cumulative_link` for ordinal outcomes.
    #[serde(default)]
    pub family: Option<Family>,
    #[serde(default = "default_link")]
    pub link: Link,
    /// Category labels in increasing order. Without it, labels are ordered
    /// numerically when they all parse as numbers and lexically otherwise.
    #[serde(default)]
    pub levels: Option<Vec<String>>,
}

fn default_link() -> Link {
    Link::Logit
}

impl OutcomeConfig {
    pub fn family(&self) -> Family {
        self.family.unwrap_or(match self.kind {
            Kind::Continuous => Family::Linear,
            Kind::Binary => Family::BinaryGlm,
            Kind::Ordinal => Family::CumulativeLink,
        })
    }

    /// Model specification once the number of levels is known.
    pub fn spec(&self, levels: usize) -> Result<ModelSpec> {
        let outcome = match self.kind {
            Kind::Continuous => OutcomeKind::Continuous,
            Kind::Binary => OutcomeKind::Binary,
            Kind::Ordinal => OutcomeKind::Ordinal(levels),
        };
        ModelSpec::new(self.family(), self.link, outcome)
            .map_err(|e| CliError::Config(format!("outcome `{}`: {e}", self.column)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotOptions {
    pub frac: f64,
    pub iters: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            frac: 2.0 / 3.0,
            iters: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Data file; relative paths are resolved against the config file.
    #[serde(default)]
    pub data: Option<PathBuf>,
    pub outcomes: Vec<OutcomeConfig>,
    #[serde(default)]
    pub covariates: Vec<String>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_b")]
    pub b: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_retries")]
    pub max_refit_retries: usize,
    /// Outcome pairs to analyse, by column name; all pairs when absent.
    #[serde(default)]
    pub pairs: Option<Vec<[String; 2]>>,
    #[serde(default)]
    pub plot: PlotOptions,
}

fn default_m() -> usize {
    mixassoc::surrogate::DEFAULT_M
}

fn default_b() -> usize {
    BootstrapConfig::default().b
}

fn default_alpha() -> f64 {
    0.05
}

fn default_retries() -> usize {
    BootstrapConfig::default().max_refit_retries
}

impl AnalysisConfig {
    pub fn new(outcomes: Vec<OutcomeConfig>, covariates: Vec<String>) -> Self {
        AnalysisConfig {
            data: None,
            outcomes,
            covariates,
            m: default_m(),
            b: default_b(),
            alpha: default_alpha(),
            delta: None,
            seed: 0,
            max_refit_retries: default_retries(),
            pairs: None,
            plot: PlotOptions::default(),
        }
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: AnalysisConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let (Some(data), Some(dir)) = (&cfg.data, path.parent()) {
            if data.is_relative() {
                cfg.data = Some(dir.join(data));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.outcomes.is_empty() {
            return bad("at least one outcome is required".into());
        }
        let mut seen = BTreeSet::new();
        for c in self.outcomes.iter().map(|o| &o.column).chain(&self.covariates) {
            if !seen.insert(c.as_str()) {
                return bad(format!("column `{c}` listed more than once"));
            }
        }
        for o in &self.outcomes {
            match (o.kind, o.family()) {
                (Kind::Continuous, Family::Linear) => {}
                (Kind::Continuous, f) | (_, f @ Family::Linear) => {
                    return bad(format!("outcome `{}`: family {f:?} does not fit kind {:?}", o.column, o.kind))
                }
                (Kind::Binary, f) if f != Family::BinaryGlm => {
                    return bad(format!("outcome `{}`: binary outcomes use binary_glm", o.column))
                }
                _ => {}
            }
            if let Some(levels) = &o.levels {
                if o.kind == Kind::Continuous {
                    return bad(format!("outcome `{}`: levels given for a continuous outcome", o.column));
                }
                let distinct: BTreeSet<_> = levels.iter().collect();
                if distinct.len() != levels.len() {
                    return bad(format!("outcome `{}`: repeated level label", o.column));
                }
            }
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.b < 2 {
            return bad("b must be at least 2".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0 && d.is_finite()) {
                return bad(format!("delta must be >= 0, got {d}"));
            }
        }
        if !(self.plot.frac > 0.0 && self.plot.frac <= 1.0) {
            return bad(format!("plot.frac must lie in (0, 1], got {}", self.plot.frac));
        }
        self.pairs()?;
        Ok(())
    }

    pub fn outcome_index(&self, column: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o.column == column)
            .ok_or_else(|| CliError::Config(format!("`{column}` is not a configured outcome")))
    }

    /// Outcome index pairs to analyse.
    pub fn pairs(&self) -> Result<Vec<(usize, usize)>> {
        match &self.pairs {
            Some(list) => list
                .iter()
                .map(|[a, b]| {
                    let (i, j) = (self.outcome_index(a)?, self.outcome_index(b)?);
                    if i == j {
                        return Err(CliError::Config(format!("pair ({a}, {b}) repeats an outcome")));
                    }
                    Ok((i, j))
                })
                .collect(),
            None => {
                let k = self.outcomes.len();
                if k < 2 {
                    return Ok(Vec::new());
                }
                Ok((0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect())
            }
        }
    }

    pub fn bootstrap(&self, seed: u64) -> BootstrapConfig {
        BootstrapConfig {
            b: self.b,
            m: self.m,
            alpha: self.alpha,
            seed,
            max_refit_retries: self.max_refit_retries,
        }
    }
}
