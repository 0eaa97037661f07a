//! Fisher scoring with step halving for the discrete families.

use super::discrete::{probs, probs_jac, MAX_STACK_CATEGORIES};
use super::{dot, Family, FittedModel, ModelSpec, Params};
use crate::data::Dataset;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

pub const MAX_ITERATIONS: usize = 100;
pub const REL_TOLERANCE: f64 = 1e-8;
/// Largest tolerated deviation of `x'β` from its mean before the fit is
/// declared separated.
pub const SEPARATION_LIMIT: f64 = 30.0;

const MAX_HALVINGS: usize = 50;
const POLISH_STEPS: usize = 5;
/// Stereotype fits alternate between the (α, β) and φ blocks for this many
/// iterations before switching to joint steps.
const ALTERNATING_WARMUP: usize = 5;

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_iter: usize,
    pub rel_tol: f64,
    pub separation_limit: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: MAX_ITERATIONS,
            rel_tol: REL_TOLERANCE,
            separation_limit: SEPARATION_LIMIT,
        }
    }
}

pub(crate) struct Problem<'a> {
    spec: &'a ModelSpec,
    data: &'a Dataset,
    categories: usize,
    codes: Vec<usize>,
}

pub(crate) struct Eval {
    pub score: Vec<f64>,
    /// Expected information restricted to the requested coordinates.
    pub info: DMatrix<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(spec: &'a ModelSpec, data: &'a Dataset) -> Self {
        let codes = data
            .y
            .iter()
            .map(|&v| spec.category_index(v).unwrap_or(usize::MAX))
            .collect();
        Problem {
            spec,
            data,
            categories: spec.categories().unwrap_or(0),
            codes,
        }
    }

    fn code(&self, i: usize) -> Result<usize> {
        match self.codes[i] {
            usize::MAX => Err(Error::OutOfSupport {
                value: self.data.y[i],
            }),
            k => Ok(k),
        }
    }

    /// Log-likelihood, or the first offending row.
    pub fn loglik_rows(&self, theta: &[f64]) -> std::result::Result<f64, usize> {
        let mut buf = [0.0; MAX_STACK_CATEGORIES];
        let mut heap = Vec::new();
        let p: &mut [f64] = if self.categories <= buf.len() {
            &mut buf[..self.categories]
        } else {
            heap.resize(self.categories, 0.0);
            &mut heap
        };
        let mut total = 0.0;
        for (i, x) in self.data.x.rows().enumerate() {
            let k = self.codes[i];
            if k == usize::MAX {
                return Err(i);
            }
            probs(self.spec, theta, x, p);
            let pk = p[k];
            if !(pk > 0.0) || !pk.is_finite() {
                return Err(i);
            }
            total += pk.ln();
        }
        Ok(total)
    }

    pub fn loglik(&self, theta: &[f64]) -> f64 {
        self.loglik_rows(theta).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn loglik_checked(&self, theta: &[f64]) -> Result<f64> {
        for i in 0..self.codes.len() {
            self.code(i)?;
        }
        self.loglik_rows(theta)
            .map_err(|row| Error::NonFiniteLikelihood { row })
    }

    /// Score and Fisher information over the `free` coordinates.
    pub fn evaluate(&self, theta: &[f64], free: &[usize]) -> Result<Eval> {
        let j = self.categories;
        let np = theta.len();
        let nf = free.len();
        let mut p = vec![0.0; j];
        let mut jac = vec![0.0; j * np];
        let mut scratch = vec![0.0; j * np + np];
        let mut score = vec![0.0; nf];
        let mut info = vec![0.0; nf * nf];
        let mut g = vec![0.0; nf];
        for (i, x) in self.data.x.rows().enumerate() {
            let y = self.code(i)?;
            probs_jac(self.spec, theta, x, &mut p, &mut jac, &mut scratch);
            let py = p[y];
            if !(py > 0.0) || !py.is_finite() {
                return Err(Error::NonFiniteLikelihood { row: i });
            }
            for (s, &c) in score.iter_mut().zip(free) {
                *s += jac[y * np + c] / py;
            }
            for k in 0..j {
                if !(p[k] > 0.0) {
                    continue;
                }
                let w = 1.0 / p[k];
                let row = &jac[k * np..(k + 1) * np];
                for (gv, &c) in g.iter_mut().zip(free) {
                    *gv = row[c];
                }
                for r in 0..nf {
                    let gr = g[r] * w;
                    if gr == 0.0 {
                        continue;
                    }
                    let out = &mut info[r * nf..(r + 1) * nf];
                    for c in r..nf {
                        out[c] += gr * g[c];
                    }
                }
            }
        }
        for r in 0..nf {
            for c in 0..r {
                info[r * nf + c] = info[c * nf + r];
            }
        }
        Ok(Eval {
            score,
            info: DMatrix::from_row_slice(nf, nf, &info),
        })
    }
}

/// Solves `info · δ = score`, adding a small ridge if the information is
/// numerically singular.
fn scoring_step(eval: &Eval) -> Option<DVector<f64>> {
    let nf = eval.score.len();
    let rhs = DVector::from_column_slice(&eval.score);
    if let Some(ch) = eval.info.clone().cholesky() {
        return Some(ch.solve(&rhs));
    }
    let scale = (0..nf).map(|i| eval.info[(i, i)].abs()).sum::<f64>() / nf.max(1) as f64;
    let mut ridge = 1e-10 * scale.max(1e-300);
    for _ in 0..6 {
        let mut m = eval.info.clone();
        for i in 0..nf {
            m[(i, i)] += ridge;
        }
        if let Some(ch) = m.cholesky() {
            return Some(ch.solve(&rhs));
        }
        ridge *= 100.0;
    }
    None
}

/// One scoring step on `free` with step halving. Returns the new log-likelihood
/// and the Newton decrement `score'δ`.
fn step(
    problem: &Problem,
    theta: &mut Vec<f64>,
    free: &[usize],
    loglik: f64,
) -> Result<Option<(f64, f64)>> {
    let eval = problem.evaluate(theta, free)?;
    let Some(delta) = scoring_step(&eval) else {
        return Ok(None);
    };
    let decrement = dot(delta.as_slice(), &eval.score);
    let slack = 1e-13 * loglik.abs().max(1.0);
    let mut t = 1.0;
    let mut cand = theta.clone();
    for _ in 0..MAX_HALVINGS {
        for (k, &c) in free.iter().enumerate() {
            cand[c] = theta[c] + t * delta[k];
        }
        let ll = problem.loglik(&cand);
        // Within `slack` the log-likelihood cannot resolve the step, so the
        // scoring direction is trusted.
        if ll.is_finite() && ll >= loglik - slack {
            *theta = cand;
            return Ok(Some((ll, decrement)));
        }
        t *= 0.5;
    }
    Ok(Some((loglik, decrement)))
}

fn start_values(spec: &ModelSpec, data: &Dataset, problem: &Problem) -> Vec<f64> {
    let j = problem.categories;
    let d = data.d();
    let n = data.n() as f64;
    let mut freq = vec![0.0; j];
    for &k in &problem.codes {
        freq[k] += 1.0 / n;
    }
    let mut theta = Vec::with_capacity(spec.n_params(d));
    match spec.family {
        Family::BinaryGlm => theta.push(spec.link.quantile(freq[1])),
        Family::CumulativeLink => {
            let mut acc = 0.0;
            for f in &freq[..j - 1] {
                acc += f;
                theta.push(spec.link.quantile(acc));
            }
        }
        Family::AdjacentCategoryLogit => {
            theta.extend((0..j - 1).map(|k| (freq[k] / freq[k + 1]).ln()));
        }
        Family::OrderedStereotype => {
            theta.extend((1..j).map(|k| (freq[k] / freq[0]).ln()));
        }
        Family::Linear => unreachable!(),
    }
    theta.extend(std::iter::repeat(0.0).take(d));
    if spec.family == Family::OrderedStereotype {
        theta.extend((1..j - 1).map(|k| k as f64 / (j - 1) as f64));
    }
    theta
}

fn check_separation(spec: &ModelSpec, data: &Dataset, theta: &[f64], limit: f64) -> Result<()> {
    let d = data.d();
    if d == 0 {
        return Ok(());
    }
    let a = spec.n_intercepts();
    let beta = &theta[a..a + d];
    let etas: Vec<f64> = data.x.rows().map(|x| dot(beta, x)).collect();
    let mean = etas.iter().sum::<f64>() / etas.len() as f64;
    if etas.iter().any(|e| (e - mean).abs() > limit) {
        return Err(Error::SeparationDetected { limit });
    }
    Ok(())
}

pub(crate) fn fit_discrete(spec: &ModelSpec, data: &Dataset, opts: &FitOptions) -> Result<FittedModel> {
    let problem = Problem::new(spec, data);
    let d = data.d();
    let a = spec.n_intercepts();
    let np = spec.n_params(d);
    let mut theta = start_values(spec, data, &problem);
    let mut loglik = problem.loglik_checked(&theta)?;

    let all: Vec<usize> = (0..np).collect();
    let mean_block: Vec<usize> = (0..a + d).collect();
    let score_block: Vec<usize> = (a + d..np).collect();
    let stereotype = spec.family == Family::OrderedStereotype && !score_block.is_empty();

    let mut converged = false;
    let mut n_iter = 0;
    while n_iter < opts.max_iter {
        n_iter += 1;
        let before = loglik;
        let mut progressed = false;
        if stereotype && n_iter <= ALTERNATING_WARMUP {
            for block in [&mean_block, &score_block] {
                if let Some((ll, _)) = step(&problem, &mut theta, block, loglik)? {
                    loglik = ll;
                    progressed = true;
                }
            }
        } else if let Some((ll, _)) = step(&problem, &mut theta, &all, loglik)? {
            loglik = ll;
            progressed = true;
        } else if stereotype {
            // joint information singular (e.g. β ≈ 0): fall back to blocks
            for block in [&mean_block, &score_block] {
                if let Some((ll, _)) = step(&problem, &mut theta, block, loglik)? {
                    loglik = ll;
                    progressed = true;
                }
            }
        }
        if !progressed {
            return Err(Error::RankDeficientDesign);
        }
        check_separation(spec, data, &theta, opts.separation_limit)?;
        let rel = (loglik - before).abs() / before.abs().max(f64::MIN_POSITIVE);
        if rel < opts.rel_tol && !(stereotype && n_iter <= ALTERNATING_WARMUP) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: opts.max_iter,
        });
    }

    // A few extra joint steps drive the score to round-off level.
    for _ in 0..POLISH_STEPS {
        match step(&problem, &mut theta, &all, loglik)? {
            Some((ll, decrement)) => {
                loglik = ll;
                if decrement.abs() < 1e-24 {
                    break;
                }
            }
            None => break,
        }
    }
    check_separation(spec, data, &theta, opts.separation_limit)?;

    let std_errors = match problem.evaluate(&theta, &all) {
        Ok(eval) => match eval.info.clone().cholesky() {
            Some(ch) => {
                let inv = ch.inverse();
                (0..np).map(|i| inv[(i, i)].sqrt()).collect()
            }
            None => vec![f64::NAN; np],
        },
        Err(_) => vec![f64::NAN; np],
    };

    let params = Params::from_theta(spec, d, &theta, None);
    let mut warnings = Vec::new();
    if spec.family == Family::OrderedStereotype && params.phi.windows(2).any(|w| w[1] < w[0]) {
        warnings.push(format!(
            "stereotype scores are not monotone: {:?}",
            params.phi
        ));
    }
    Ok(FittedModel {
        spec: *spec,
        params,
        loglik,
        converged,
        n_iter,
        std_errors,
        warnings,
        theta,
    })
}
