//! Locally weighted scatterplot smoothing.
//!
//! Each point gets a local linear fit over its `⌊frac·n⌋` nearest neighbours in
//! `x`, weighted by the tricube kernel on the distance scaled by the farthest
//! of those neighbours. Robustness passes reweight by the bisquare of the
//! residuals over six times their median absolute value.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LowessError {
    #[error("lowess needs at least 5 points, got {0}")]
    TooFewPoints(usize),
    #[error("lowess fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("x and y lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-finite input at index {0}")]
    NonFinite(usize),
    #[error("all weights vanish in the window around x = {x}")]
    DegenerateWindow { x: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    /// Input `x` sorted ascending.
    pub x: Vec<f64>,
    pub smooth: Vec<f64>,
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

fn bisquare(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u;
        t * t
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Local linear fit at `x[i]` over all points with positive weight.
fn fit_at(x: &[f64], y: &[f64], robust: &[f64], i: usize, k: usize) -> Result<f64, LowessError> {
    let n = x.len();
    let xi = x[i];
    // Slide a window of k points to the one with the smallest span around x[i].
    let mut lo = i.saturating_sub(k - 1).min(n - k);
    while lo + k < n && xi - x[lo] > x[lo + k] - xi {
        lo += 1;
    }
    let h = (xi - x[lo]).max(x[lo + k - 1] - xi);
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    let mut w = vec![0.0; n];
    for j in 0..n {
        let d = (x[j] - xi).abs();
        let k = if h > 0.0 { tricube(d / h) } else { (d == 0.0) as u8 as f64 };
        w[j] = k * robust[j];
        sw += w[j];
        sx += w[j] * x[j];
        sy += w[j] * y[j];
    }
    if !(sw > 0.0) {
        return Err(LowessError::DegenerateWindow { x: xi });
    }
    let (mx, my) = (sx / sw, sy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for j in 0..n {
        if w[j] > 0.0 {
            let dx = x[j] - mx;
            sxx += w[j] * dx * dx;
            sxy += w[j] * dx * (y[j] - my);
        }
    }
    let scale = (x[n - 1] - x[0]).max(f64::MIN_POSITIVE);
    if sxx <= 1e-12 * scale * scale * sw {
        return Ok(my);
    }
    Ok(my + sxy / sxx * (xi - mx))
}

/// Smooths `y` against `x`; the curve is evaluated at every input `x`, sorted.
pub fn lowess(x: &[f64], y: &[f64], frac: f64, iters: usize) -> Result<Curve, LowessError> {
    if x.len() != y.len() {
        return Err(LowessError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 5 {
        return Err(LowessError::TooFewPoints(n));
    }
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(LowessError::InvalidFraction(frac));
    }
    if let Some(i) = (0..n).find(|&i| !x[i].is_finite() || !y[i].is_finite()) {
        return Err(LowessError::NonFinite(i));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let k = ((frac * n as f64 + 1e-10).floor() as usize).clamp(2, n);

    let mut robust = vec![1.0; n];
    let mut smooth = vec![0.0; n];
    for pass in 0..=iters {
        for i in 0..n {
            smooth[i] = fit_at(&xs, &ys, &robust, i, k)?;
        }
        if pass == iters {
            break;
        }
        let resid: Vec<f64> = ys.iter().zip(&smooth).map(|(y, s)| y - s).collect();
        let mut abs: Vec<f64> = resid.iter().map(|r| r.abs()).collect();
        let mean_abs = abs.iter().sum::<f64>() / n as f64;
        let s = median(&mut abs);
        // Same stopping rule as Cleveland's reference implementation.
        if s == 0.0 || 6.0 * s < 1e-7 * mean_abs {
            break;
        }
        for (w, r) in robust.iter_mut().zip(&resid) {
            *w = bisquare(r / (6.0 * s));
        }
    }
    Ok(Curve { x: xs, smooth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_response() {
        let x: Vec<f64> = (0..20).map(|i| (i * 7 % 20) as f64).collect();
        let c = lowess(&x, &[4.5; 20], 2.0 / 3.0, 3).unwrap();
        assert!(c.smooth.iter().all(|&s| (s - 4.5).abs() < 1e-12));
        assert!(c.x.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn reproduces_a_line() {
        let x: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 / 7.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let c = lowess(&x, &y, 0.5, 3).unwrap();
        for (xv, s) in c.x.iter().zip(&c.smooth) {
            assert!((s - (2.0 * xv + 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn input_errors() {
        assert_eq!(lowess(&[1.0; 4], &[1.0; 4], 0.5, 0), Err(LowessError::TooFewPoints(4)));
        assert_eq!(lowess(&[1.0; 5], &[1.0; 4], 0.5, 0), Err(LowessError::LengthMismatch(5, 4)));
        assert_eq!(lowess(&[1.0; 5], &[1.0; 5], 0.0, 0), Err(LowessError::InvalidFraction(0.0)));
        let mut x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        x[2] = f64::NAN;
        assert_eq!(lowess(&x, &[1.0; 5], 0.5, 0), Err(LowessError::NonFinite(2)));
    }

    #[test]
    fn tied_window_uses_the_tied_points() {
        let x = [0.0, 0.0, 0.0, 0.0, 1.0, 2.0];
        let y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let c = lowess(&x, &y, 0.5, 0).unwrap();
        assert_eq!(c.smooth[0], 2.5);
    }
}
