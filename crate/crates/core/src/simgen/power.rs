//! Power-study generator: a five-level ordinal `Y₁` from an adjacent-category
//! logit model and a continuous `Y₂ = η[Y₁] + β₂'X + ε`.

use super::baseline::lrt_partial;
use super::observed_levels;
use crate::data::{Covariates, PairData};
use crate::error::{Error, Result};
use crate::inference::{bootstrap_t, p_value_simple, BootstrapConfig};
use crate::models::{FittedModel, ModelSpec, Params};
use crate::rng::RngStream;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaShape {
    LinearEta,
    QuadraticEta,
    ExponentialEta,
}

impl EtaShape {
    pub fn eta(self, lambda: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (k, e) in out.iter_mut().enumerate() {
            let base = lambda * k as f64;
            *e = match self {
                EtaShape::LinearEta => base,
                EtaShape::QuadraticEta => base * base,
                EtaShape::ExponentialEta => base.exp(),
            };
        }
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            EtaShape::LinearEta => "linear",
            EtaShape::QuadraticEta => "quadratic",
            EtaShape::ExponentialEta => "exponential",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerScenario {
    pub lambda: f64,
    pub shape: EtaShape,
    pub n: usize,
    pub reps: usize,
    pub alpha_cut: [f64; 4],
    pub beta1: [f64; 2],
    pub beta2: [f64; 2],
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for PowerScenario {
    fn default() -> Self {
        PowerScenario {
            lambda: 0.0,
            shape: EtaShape::LinearEta,
            n: 200,
            reps: 1000,
            alpha_cut: [-3.0, -2.0, 0.0, 2.0],
            beta1: [-0.5, 1.5],
            beta2: [1.0, 1.5],
            noise_sd: 1.0,
            seed: 0,
        }
    }
}

impl PowerScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!("lambda = {}", self.lambda)));
        }
        if !(self.noise_sd > 0.0) {
            return Err(Error::InvalidConfig(format!("noise_sd = {}", self.noise_sd)));
        }
        if self.n < 10 {
            return Err(Error::InvalidConfig(format!("n = {}", self.n)));
        }
        Ok(())
    }

    pub fn ordinal_model(&self) -> Result<FittedModel> {
        FittedModel::from_params(
            ModelSpec::adjacent_category(5)?,
            Params {
                intercepts: self.alpha_cut.to_vec(),
                beta: self.beta1.to_vec(),
                sigma: None,
                phi: vec![],
            },
        )
    }
}

/// Draws one dataset: `y1` ordinal `1..=5`, `y2` continuous, `x = (X₁, X₂)`
/// with `X₁ ~ N(0, 2²)` and `X₂ ~ U(0, 1)`.
pub fn gen_power(sc: &PowerScenario, stream: &RngStream) -> Result<PairData> {
    sc.validate()?;
    let mut xr = stream.child(0).rng();
    let mut values = Vec::with_capacity(sc.n * 2);
    for _ in 0..sc.n {
        let z: f64 = xr.sample(StandardNormal);
        values.push(2.0 * z);
        values.push(xr.random::<f64>());
    }
    let x = Covariates::new(sc.n, 2, values)?;
    let y1 = sc.ordinal_model()?.simulate(&x, &mut stream.child(1).rng())?;
    let eta = sc.shape.eta(sc.lambda);
    let noise = Normal::new(0.0, sc.noise_sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut er = stream.child(2).rng();
    let y2 = x
        .rows()
        .zip(&y1)
        .map(|(r, &c)| {
            eta[c as usize - 1] + sc.beta2[0] * r[0] + sc.beta2[1] * r[1] + noise.sample(&mut er)
        })
        .collect();
    PairData::new(y1, y2, x)
}

/// Adjacent-category spec for `levels` observed categories (binary logit when
/// only two remain).
pub fn ordinal_spec_for(levels: usize) -> Result<ModelSpec> {
    match levels {
        2 => Ok(ModelSpec::new(
            crate::models::Family::BinaryGlm,
            crate::dist::Link::Logit,
            crate::models::OutcomeKind::Ordinal(2),
        )?),
        j => ModelSpec::adjacent_category(j),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proposed,
    Lrt,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Lrt => "lrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerOptions {
    /// Bootstrap replicates for the proposed test.
    pub b: usize,
    pub m: usize,
    pub level: f64,
    pub methods: Vec<Method>,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            b: 300,
            m: crate::surrogate::DEFAULT_M,
            level: 0.05,
            methods: vec![Method::Proposed, Method::Lrt],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub scenario_id: usize,
    pub lambda: f64,
    pub shape: EtaShape,
    pub method: Method,
    pub rejection_rate: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Bootstrap p-value of `H₀: 𝒯 = 0` between the ordinal `y1` (adjacent-category
/// model on its observed levels) and the continuous `y2` (linear model).
pub fn proposed_test(pair: &PairData, b: usize, m: usize, seed: u64) -> Result<f64> {
    let (codes, levels) = observed_levels(&pair.y1)?;
    let spec1 = ordinal_spec_for(levels)?;
    let y1 = if levels == 2 { codes.iter().map(|c| c - 1.0).collect() } else { codes };
    let recoded = PairData::new(y1, pair.y2.clone(), pair.x.clone())?;
    let cfg = BootstrapConfig {
        b,
        m,
        seed,
        ..BootstrapConfig::default()
    };
    let dist = bootstrap_t(&recoded, &spec1, &ModelSpec::linear(), &cfg)?;
    p_value_simple(&dist)
}

/// Per-replicate p-values of each method for one scenario, in replicate order.
/// Both methods see the same dataset in every replicate. A method that fails
/// on a dataset reports `None`.
pub fn run_power_cell(sc: &PowerScenario, opts: &PowerOptions) -> Result<Vec<Vec<Option<f64>>>> {
    sc.validate()?;
    let root = RngStream::new(sc.seed);
    let per_rep: Vec<Vec<Option<f64>>> = (0..sc.reps)
        .into_par_iter()
        .map(|rep| {
            let stream = root.child(rep as u64);
            let Ok(pair) = gen_power(sc, &stream.child(0)) else {
                return vec![None; opts.methods.len()];
            };
            let boot_seed: u64 = stream.child(1).rng().random();
            opts.methods
                .iter()
                .map(|method| match method {
                    Method::Proposed => proposed_test(&pair, opts.b, opts.m, boot_seed).ok(),
                    Method::Lrt => lrt_partial(&pair.y2, &pair.y1, &pair.x).ok().map(|r| r.p_value),
                })
                .collect()
        })
        .collect();
    Ok(per_rep)
}

/// Rejection rates at `opts.level` for every scenario and method. Datasets on
/// which a method fails count as non-rejections.
pub fn run_power_study(grid: &[PowerScenario], opts: &PowerOptions) -> Result<Vec<PowerRow>> {
    let mut rows = Vec::new();
    for (id, sc) in grid.iter().enumerate() {
        let per_rep = run_power_cell(sc, opts)?;
        for (k, &method) in opts.methods.iter().enumerate() {
            let rejections = per_rep
                .iter()
                .filter(|ps| ps[k].is_some_and(|p| p < opts.level))
                .count();
            rows.push(PowerRow {
                scenario_id: id,
                lambda: sc.lambda,
                shape: sc.shape,
                method,
                rejection_rate: rejections as f64 / sc.reps as f64,
                reps: sc.reps,
                seed: sc.seed,
            });
        }
    }
    Ok(rows)
}

pub fn default_lambda_grid() -> Vec<f64> {
    vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.3]
}

/// Every `(shape, λ)` combination, each cell seeded from `seed` and its index.
pub fn power_grid(base: &PowerScenario, shapes: &[EtaShape], lambdas: &[f64], seed: u64) -> Vec<PowerScenario> {
    let root = RngStream::new(seed);
    let mut grid = Vec::new();
    for &shape in shapes {
        for &lambda in lambdas {
            let cell = grid.len() as u64;
            grid.push(PowerScenario {
                lambda,
                shape,
                seed: root.child(cell).rng().random(),
                ..base.clone()
            });
        }
    }
    grid
}
