//! Report builders behind the `fit`, `assoc`, `moderation` and `plotdata`
//! commands.

use crate::config::{AnalysisConfig, PlotOptions};
use crate::dataset::{format_float, LoadedData};
use crate::error::{CliError, Result};
use crate::lowess::{lowess, Curve};
use mixassoc::inference::{bootstrap_marginal_t, bootstrap_moderation_difference, BootstrapDistribution};
use mixassoc::{
    bootstrap_moderation, bootstrap_t, fit, moderation_analysis, normalize, p_value_composite, p_value_simple,
    residual_matrix, summarize, Dataset, Error, ModelSpec, PairData, Params, RngStream,
};
use rand::Rng;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub outcome: String,
    pub spec: ModelSpec,
    pub levels: Option<Vec<String>>,
    pub covariates: Vec<String>,
    pub params: Params,
    pub std_errors: Vec<f64>,
    pub loglik: f64,
    pub converged: bool,
    pub n_iter: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub n: usize,
    pub rejected_lines: Vec<u64>,
    pub models: Vec<ModelReport>,
}

pub fn fit_report(data: &LoadedData) -> Result<FitReport> {
    let models = data
        .outcomes
        .iter()
        .map(|o| {
            let model = fit(&o.spec, &Dataset::new(o.y.clone(), data.covariates.clone())?)?;
            Ok(ModelReport {
                outcome: o.column.clone(),
                spec: o.spec,
                levels: o.levels.clone(),
                covariates: data.covariate_names.clone(),
                params: model.params,
                std_errors: model.std_errors,
                loglik: model.loglik,
                converged: model.converged,
                n_iter: model.n_iter,
                warnings: model.warnings,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FitReport {
        n: data.n(),
        rejected_lines: data.rejected_lines.clone(),
        models,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub m: usize,
    pub b: usize,
    pub alpha: f64,
    pub delta: Option<f64>,
    pub seed: u64,
}

impl Settings {
    fn from_config(cfg: &AnalysisConfig) -> Self {
        Settings {
            m: cfg.m,
            b: cfg.b,
            alpha: cfg.alpha,
            delta: cfg.delta,
            seed: cfg.seed,
        }
    }
}

/// Bootstrap summary of one quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inference {
    pub estimate: f64,
    pub bootstrap_mean: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `None` when too few replicates survived for a p-value.
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value_composite: Option<f64>,
    pub replicates: usize,
    pub failures: usize,
}

fn optional_p(r: mixassoc::Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(p) => Ok(Some(p)),
        Err(Error::TooFewObservations(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn inference(estimate: f64, dist: &BootstrapDistribution, alpha: f64, delta: Option<f64>) -> Result<Inference> {
    let s = summarize(dist, alpha)?;
    let p_value_composite = match delta {
        Some(d) => optional_p(p_value_composite(dist, d))?,
        None => None,
    };
    Ok(Inference {
        estimate,
        bootstrap_mean: s.estimate_mean,
        se: s.se,
        ci_lo: s.ci_lo,
        ci_hi: s.ci_hi,
        p_value: optional_p(p_value_simple(dist))?,
        p_value_composite,
        replicates: dist.len(),
        failures: dist.failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moderation {
    pub delta: f64,
    pub pct_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAssoc {
    pub outcome1: String,
    pub outcome2: String,
    pub marginal: Inference,
    pub partial: Inference,
    pub moderation: Moderation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssocReport {
    pub n: usize,
    pub rejected_lines: Vec<u64>,
    pub settings: Settings,
    pub pairs: Vec<PairAssoc>,
}

/// Streams of pair `k`: child 0 for the point estimates, children 1.. seed
/// the bootstrap runs.
fn pair_stream(seed: u64, k: usize) -> RngStream {
    RngStream::new(seed).child(k as u64)
}

fn derived_seed(stream: &RngStream) -> u64 {
    stream.rng().random()
}

fn specs(data: &LoadedData, i: usize, j: usize) -> (ModelSpec, ModelSpec) {
    (data.outcomes[i].spec, data.outcomes[j].spec)
}

pub fn assoc_report(cfg: &AnalysisConfig, data: &LoadedData) -> Result<AssocReport> {
    let mut pairs = Vec::new();
    for (k, (i, j)) in cfg.pairs()?.into_iter().enumerate() {
        let pair = data.pair(i, j)?;
        let (s1, s2) = specs(data, i, j);
        let stream = pair_stream(cfg.seed, k);
        let est = moderation_analysis(&pair, &s1, &s2, cfg.m, &stream.child(0))?;
        let marginal = bootstrap_marginal_t(&pair, &s1, &s2, &cfg.bootstrap(derived_seed(&stream.child(1))))?;
        let partial = bootstrap_t(&pair, &s1, &s2, &cfg.bootstrap(derived_seed(&stream.child(2))))?;
        pairs.push(PairAssoc {
            outcome1: data.outcomes[i].column.clone(),
            outcome2: data.outcomes[j].column.clone(),
            marginal: inference(est.t_marginal.t_hat, &marginal, cfg.alpha, cfg.delta)?,
            partial: inference(est.t_partial.t_hat, &partial, cfg.alpha, cfg.delta)?,
            moderation: Moderation {
                delta: est.delta,
                pct_change: est.pct_change,
            },
        });
    }
    Ok(AssocReport {
        n: data.n(),
        rejected_lines: data.rejected_lines.clone(),
        settings: Settings::from_config(cfg),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairModeration {
    pub outcome1: String,
    pub outcome2: String,
    pub t_marginal: f64,
    pub t_partial: f64,
    pub delta: f64,
    pub pct_change: Option<f64>,
    /// Bootstrap of the percentage change.
    pub bootstrap: Inference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortDifference {
    pub outcome1: String,
    pub outcome2: String,
    pub pct_change_a: Option<f64>,
    pub pct_change_b: Option<f64>,
    pub bootstrap: Inference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModerationReport {
    pub n: usize,
    pub rejected_lines: Vec<u64>,
    pub settings: Settings,
    pub pairs: Vec<PairModeration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohort_difference: Option<Vec<CohortDifference>>,
}

/// Moderation analysis of every pair; with `cohort_b`, also the bootstrap
/// difference in percentage change between the two cohorts.
pub fn moderation_report(cfg: &AnalysisConfig, data: &LoadedData, cohort_b: Option<&LoadedData>) -> Result<ModerationReport> {
    let mut pairs = Vec::new();
    let mut diffs = Vec::new();
    for (k, (i, j)) in cfg.pairs()?.into_iter().enumerate() {
        let pair = data.pair(i, j)?;
        let (s1, s2) = specs(data, i, j);
        let stream = pair_stream(cfg.seed, k);
        let est = moderation_analysis(&pair, &s1, &s2, cfg.m, &stream.child(0))?;
        let boot_cfg = cfg.bootstrap(derived_seed(&stream.child(3)));
        let dist = bootstrap_moderation(&pair, &s1, &s2, &boot_cfg)?;
        let estimate = est.pct_change.unwrap_or(f64::NAN);
        pairs.push(PairModeration {
            outcome1: data.outcomes[i].column.clone(),
            outcome2: data.outcomes[j].column.clone(),
            t_marginal: est.t_marginal.t_hat,
            t_partial: est.t_partial.t_hat,
            delta: est.delta,
            pct_change: est.pct_change,
            bootstrap: inference(estimate, &dist, cfg.alpha, None)?,
        });
        if let Some(other) = cohort_b {
            if other.outcomes[i].spec != s1 || other.outcomes[j].spec != s2 {
                return Err(CliError::Data(format!(
                    "cohorts differ in the levels of `{}` or `{}`",
                    data.outcomes[i].column, data.outcomes[j].column
                )));
            }
            let pair_b = other.pair(i, j)?;
            let est_b = moderation_analysis(&pair_b, &s1, &s2, cfg.m, &stream.child(0))?;
            let diff = bootstrap_moderation_difference(&pair, &pair_b, &s1, &s2, &boot_cfg)?;
            let estimate = match (est.pct_change, est_b.pct_change) {
                (Some(a), Some(b)) => a - b,
                _ => f64::NAN,
            };
            diffs.push(CohortDifference {
                outcome1: data.outcomes[i].column.clone(),
                outcome2: data.outcomes[j].column.clone(),
                pct_change_a: est.pct_change,
                pct_change_b: est_b.pct_change,
                bootstrap: inference(estimate, &diff, cfg.alpha, None)?,
            });
        }
    }
    Ok(ModerationReport {
        n: data.n(),
        rejected_lines: data.rejected_lines.clone(),
        settings: Settings::from_config(cfg),
        pairs,
        cohort_difference: cohort_b.map(|_| diffs),
    })
}

/// Transformed first-column residuals of a pair and their LOWESS curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotData {
    pub seed: u64,
    pub h_r1: Vec<f64>,
    pub h_r2: Vec<f64>,
    pub lowess: Curve,
}

/// Both outcomes are adjusted for the pair's covariates; outcome `k` draws its
/// surrogates from `RngStream::new(seed).child(k)`.
pub fn plot_data(pair: &PairData, spec1: &ModelSpec, spec2: &ModelSpec, seed: u64, opts: &PlotOptions) -> Result<PlotData> {
    let (d1, d2) = (pair.first(), pair.second());
    let m1 = fit(spec1, &d1)?;
    let m2 = fit(spec2, &d2)?;
    let root = RngStream::new(seed);
    let r1 = residual_matrix(&m1, &d1, 1, &root.child(0))?;
    let r2 = residual_matrix(&m2, &d2, 1, &root.child(1))?;
    let h = |r: &[f64]| r.iter().map(|&v| normalize(v)).collect::<mixassoc::Result<Vec<f64>>>();
    let (h_r1, h_r2) = (h(r1.column(0))?, h(r2.column(0))?);
    let lowess = lowess(&h_r1, &h_r2, opts.frac, opts.iters)?;
    Ok(PlotData { seed, h_r1, h_r2, lowess })
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Data(format!("write failed: {e}"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Data(format!("write failed: {e}"))
}

/// Points file: a `# seed=...` comment line, then columns `h_r1,h_r2`.
pub fn write_points<W: Write>(pd: &PlotData, mut w: W) -> Result<()> {
    writeln!(w, "# seed={}, surrogate column 0", pd.seed).map_err(io_err)?;
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["h_r1", "h_r2"]).map_err(csv_err)?;
    for (a, b) in pd.h_r1.iter().zip(&pd.h_r2) {
        c.write_record([format_float(*a), format_float(*b)]).map_err(csv_err)?;
    }
    c.flush().map_err(io_err)
}

/// Curve file: columns `x,smooth`, `x` ascending.
pub fn write_curve<W: Write>(pd: &PlotData, opts: &PlotOptions, mut w: W) -> Result<()> {
    writeln!(w, "# seed={}, lowess frac={}, iters={}", pd.seed, opts.frac, opts.iters).map_err(io_err)?;
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["x", "smooth"]).map_err(csv_err)?;
    for (x, s) in pd.lowess.x.iter().zip(&pd.lowess.smooth) {
        c.write_record([format_float(*x), format_float(*s)]).map_err(csv_err)?;
    }
    c.flush().map_err(io_err)
}
