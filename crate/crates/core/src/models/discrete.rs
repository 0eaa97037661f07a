//! Category probabilities and their parameter Jacobians for the discrete
//! families. `theta` is laid out as `[intercepts, slopes, free scores]`.

use super::{dot, Family, ModelSpec};

pub(crate) const MAX_STACK_CATEGORIES: usize = 16;

/// Fills `p` (length `J`) with the category probabilities at `x`.
pub(crate) fn probs(spec: &ModelSpec, theta: &[f64], x: &[f64], p: &mut [f64]) {
    let a = spec.n_intercepts();
    let d = x.len();
    let eta = dot(&theta[a..a + d], x);
    match spec.family {
        Family::BinaryGlm => {
            let u = theta[0] + eta;
            p[0] = spec.link.sf(u);
            p[1] = spec.link.cdf(u);
        }
        Family::CumulativeLink => cumulative_probs(spec, &theta[..a], eta, p),
        Family::AdjacentCategoryLogit => {
            adjacent_logits(&theta[..a], eta, p);
            softmax_in_place(p);
        }
        Family::OrderedStereotype => {
            stereotype_logits(&theta[..a], &theta[a + d..], eta, p);
            softmax_in_place(p);
        }
        Family::Linear => unreachable!("linear family has no categories"),
    }
}

/// Probabilities plus `∂p_k/∂θ_c` written row-major into `jac` (`J × P`).
/// `scratch` must hold at least `J × P + P` values.
pub(crate) fn probs_jac(
    spec: &ModelSpec,
    theta: &[f64],
    x: &[f64],
    p: &mut [f64],
    jac: &mut [f64],
    scratch: &mut [f64],
) {
    let a = spec.n_intercepts();
    let d = x.len();
    let np = theta.len();
    let j = p.len();
    let eta = dot(&theta[a..a + d], x);
    jac[..j * np].fill(0.0);
    match spec.family {
        Family::BinaryGlm => {
            let u = theta[0] + eta;
            p[0] = spec.link.sf(u);
            p[1] = spec.link.cdf(u);
            let g = spec.link.pdf(u);
            jac[np] = g;
            jac[0] = -g;
            for c in 0..d {
                jac[np + 1 + c] = g * x[c];
                jac[1 + c] = -g * x[c];
            }
        }
        Family::CumulativeLink => {
            let alpha = &theta[..a];
            cumulative_probs(spec, alpha, eta, p);
            // g[k] is the density at cut-point k (0-based, k < J-1).
            let mut g_prev = 0.0;
            for k in 0..j {
                let g_k = if k + 1 < j {
                    spec.link.pdf(alpha[k] - eta)
                } else {
                    0.0
                };
                let row = &mut jac[k * np..(k + 1) * np];
                if k + 1 < j {
                    row[k] += g_k;
                }
                if k > 0 {
                    row[k - 1] -= g_prev;
                }
                let db = -(g_k - g_prev);
                for c in 0..d {
                    row[a + c] = db * x[c];
                }
                g_prev = g_k;
            }
        }
        Family::AdjacentCategoryLogit | Family::OrderedStereotype => {
            let (du, mean) = scratch[..j * np + np].split_at_mut(j * np);
            du.fill(0.0);
            if spec.family == Family::AdjacentCategoryLogit {
                adjacent_logits(&theta[..a], eta, p);
                for k in 0..j {
                    let row = &mut du[k * np..(k + 1) * np];
                    for l in k..j - 1 {
                        row[l] = 1.0;
                    }
                    let mult = (j - 1 - k) as f64;
                    for c in 0..d {
                        row[a + c] = mult * x[c];
                    }
                }
            } else {
                let free = &theta[a + d..];
                stereotype_logits(&theta[..a], free, eta, p);
                for k in 1..j {
                    let row = &mut du[k * np..(k + 1) * np];
                    row[k - 1] = 1.0;
                    let phi = stereotype_score(free, k, j);
                    for c in 0..d {
                        row[a + c] = phi * x[c];
                    }
                    if k < j - 1 {
                        row[a + d + k - 1] = eta;
                    }
                }
            }
            softmax_in_place(p);
            mean.fill(0.0);
            for k in 0..j {
                let row = &du[k * np..(k + 1) * np];
                for c in 0..np {
                    mean[c] += p[k] * row[c];
                }
            }
            for k in 0..j {
                let row = &du[k * np..(k + 1) * np];
                let out = &mut jac[k * np..(k + 1) * np];
                for c in 0..np {
                    out[c] = p[k] * (row[c] - mean[c]);
                }
            }
        }
        Family::Linear => unreachable!("linear family has no categories"),
    }
}

fn cumulative_probs(spec: &ModelSpec, alpha: &[f64], eta: f64, p: &mut [f64]) {
    let j = p.len();
    let link = spec.link;
    for k in 0..j {
        let lo = if k == 0 { None } else { Some(alpha[k - 1] - eta) };
        let hi = if k + 1 == j { None } else { Some(alpha[k] - eta) };
        p[k] = match (lo, hi) {
            (None, Some(h)) => link.cdf(h),
            (Some(l), None) => link.sf(l),
            (Some(l), Some(h)) if l > 0.0 => link.sf(l) - link.sf(h),
            (Some(l), Some(h)) => link.cdf(h) - link.cdf(l),
            (None, None) => 1.0,
        };
    }
}

/// `u_k = Σ_{l ≥ k} (α_l + η)` for categories `0..J-1`, `u_{J-1} = 0`.
fn adjacent_logits(alpha: &[f64], eta: f64, u: &mut [f64]) {
    let j = u.len();
    u[j - 1] = 0.0;
    for k in (0..j - 1).rev() {
        u[k] = u[k + 1] + alpha[k] + eta;
    }
}

fn stereotype_score(free: &[f64], k: usize, j: usize) -> f64 {
    if k == 0 {
        0.0
    } else if k == j - 1 {
        1.0
    } else {
        free[k - 1]
    }
}

fn stereotype_logits(alpha: &[f64], free: &[f64], eta: f64, u: &mut [f64]) {
    let j = u.len();
    u[0] = 0.0;
    for k in 1..j {
        u[k] = alpha[k - 1] + stereotype_score(free, k, j) * eta;
    }
}

fn softmax_in_place(u: &mut [f64]) {
    let m = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in u.iter_mut() {
        *v = (*v - m).exp();
        total += *v;
    }
    for v in u.iter_mut() {
        *v /= total;
    }
}
