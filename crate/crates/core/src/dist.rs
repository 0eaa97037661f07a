//! Link functions and the handful of distribution helpers the models need.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival function, `1 - Φ(z)` without cancellation.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal quantile. Returns ±∞ at the endpoints.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Numerically stable logistic function.
pub fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Link function `G` of a binary or cumulative model: `P = G(linear predictor)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Logit,
    Probit,
    #[serde(alias = "cloglog")]
    CLogLog,
}

impl Link {
    pub fn cdf(self, u: f64) -> f64 {
        match self {
            Link::Logit => logistic(u),
            Link::Probit => normal_cdf(u),
            Link::CLogLog => -(-u.exp()).exp_m1(),
        }
    }

    /// `1 - G(u)`, evaluated directly.
    pub fn sf(self, u: f64) -> f64 {
        match self {
            Link::Logit => logistic(-u),
            Link::Probit => normal_sf(u),
            Link::CLogLog => (-u.exp()).exp(),
        }
    }

    pub fn pdf(self, u: f64) -> f64 {
        match self {
            Link::Logit => {
                let p = logistic(u);
                p * (1.0 - p)
            }
            Link::Probit => normal_pdf(u),
            Link::CLogLog => (u - u.exp()).exp(),
        }
    }

    pub fn quantile(self, p: f64) -> f64 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        match self {
            Link::Logit => (p / (1.0 - p)).ln(),
            Link::Probit => normal_quantile(p),
            Link::CLogLog => (-(-p).ln_1p()).ln(),
        }
    }

    /// Mean of the latent error whose CDF is `G`.
    pub fn latent_mean(self) -> f64 {
        match self {
            Link::Logit | Link::Probit => 0.0,
            Link::CLogLog => -EULER_GAMMA,
        }
    }
}
