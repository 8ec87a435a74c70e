//! Least-squares helpers shared by the experiments.

use crate::error::{Error, Result};

/// Unweighted straight-line fit `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::FitDegenerate("x and y lengths differ".into()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData { found: n, needed: 2 });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::FitDegenerate("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    if !slope.is_finite() || !intercept.is_finite() {
        return Err(Error::FitDegenerate("non-finite fit".into()));
    }
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::FitDegenerate("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// Log-log slope of window increments `q(t) − q(t/2)` against `t`.
///
/// Increments over `[t/2, t]` drop the displacement accumulated before the
/// window, so an asymptotic law `q ~ C t^s + q_early` shows the slope `s`
/// without contamination from `q_early`.
pub fn increment_slope(times: &[f64], q_at: impl Fn(f64) -> f64) -> Result<LineFit> {
    let inc: Vec<f64> = times.iter().map(|&t| q_at(t) - q_at(0.5 * t)).collect();
    loglog_slope(times, &inc)
}

/// Ratios of successive window increments `q(t) − q(t/2)` on a doubling
/// time ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementRatios {
    pub times: Vec<f64>,
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl IncrementRatios {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Increments shrink geometrically, so `q(t)` is Cauchy and converges.
    pub fn is_cauchy(&self, threshold: f64) -> bool {
        !self.ratios.is_empty() && self.max_ratio() <= threshold
    }
}

/// Window increments on `times`, which must double from one entry to the next.
pub fn increment_ratios(times: &[f64], q_at: impl Fn(f64) -> f64) -> Result<IncrementRatios> {
    if times.len() < 2 {
        return Err(Error::InsufficientData { found: times.len(), needed: 2 });
    }
    if times.windows(2).any(|w| (w[1] - 2.0 * w[0]).abs() > 1e-9 * w[1]) {
        return Err(Error::FitDegenerate("increment ladder must double".into()));
    }
    let increments: Vec<f64> = times.iter().map(|&t| q_at(t) - q_at(0.5 * t)).collect();
    let ratios = increments.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(IncrementRatios {
        times: times.to_vec(),
        increments,
        ratios,
    })
}

/// `n` times doubling up to `t_final`.
pub fn doubling_ladder(t_final: f64, n: usize) -> Vec<f64> {
    (0..n).rev().map(|j| t_final / f64::powi(2.0, j as i32)).collect()
}

/// Linear interpolation of a sampled curve.
pub fn interpolate(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    if t <= ts[0] {
        return ys[0];
    }
    let n = ts.len();
    if t >= ts[n - 1] {
        return ys[n - 1];
    }
    let i = ts.partition_point(|&s| s <= t) - 1;
    let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
    ys[i] + w * (ys[i + 1] - ys[i])
}

/// `n` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(matches!(fit_line(&[1.0], &[1.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn increment_slope_ignores_offsets() {
        let ts = geometric_ladder(10.0, 1000.0, 9);
        let f = increment_slope(&ts, |t| 50.0 + 3.0 * t.powf(1.0 / 3.0)).unwrap();
        assert!((f.slope - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_endpoints() {
        let l = geometric_ladder(1e-3, 1e-2, 5);
        assert_eq!(l.len(), 5);
        assert!((l[0] - 1e-3).abs() < 1e-18 && (l[4] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn increments_of_convergent_and_divergent_laws() {
        let ts = doubling_ladder(64.0, 4);
        assert_eq!(ts, vec![8.0, 16.0, 32.0, 64.0]);
        let conv = increment_ratios(&ts, |t| 1.0 - 1.0 / t).unwrap();
        assert!(conv.ratios.iter().all(|r| (r - 0.5).abs() < 1e-12));
        assert!(conv.is_cauchy(0.8));
        let div = increment_ratios(&ts, |t| t.cbrt()).unwrap();
        assert!(div.ratios.iter().all(|r| (r - 2f64.cbrt()).abs() < 1e-12));
        assert!(!div.is_cauchy(0.8));
        assert!(increment_ratios(&[1.0, 3.0], |t| t).is_err());
    }
}
