//! Interval estimates, exponent fits and the Kailath reference curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `k` events in `n` trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // clamp so the interval always contains p despite rounding
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// One row of an error curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: usize,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
    pub trials: usize,
}

impl CurvePoint {
    pub fn new(x: usize, errors: usize, trials: usize) -> Self {
        let (lo, hi) = wilson_interval(errors, trials, Z95);
        let rate = if trials == 0 { 0.0 } else { errors as f64 / trials as f64 };
        CurvePoint { x, rate, lo, hi, trials }
    }

    pub fn errors(&self) -> usize {
        (self.rate * self.trials as f64).round() as usize
    }

    /// Whether the two 95% intervals overlap.
    pub fn overlaps(&self, other: &CurvePoint) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Error rates over a sweep of `n` or `m`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub points: Vec<CurvePoint>,
}

impl ErrorCurve {
    /// Each rate is at most the previous point's upper bound.
    pub fn non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].rate <= w[0].hi)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,rate,lo,hi,trials\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{},{},{}\n", p.x, p.rate, p.lo, p.hi, p.trials));
        }
        s
    }
}

/// Least-squares line through `(x, -log2 rate)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Bits per unit of `x`.
    pub slope: f64,
    pub intercept: f64,
    /// Points with nonzero rate, in input order.
    pub used: Vec<usize>,
    pub residuals: Vec<f64>,
}

/// Fits the error exponent on the points with nonzero error rate.
pub fn exponent_slope(curve: &ErrorCurve) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64, usize)> = curve
        .points
        .iter()
        .filter(|p| p.rate > 0.0)
        .map(|p| (p.x as f64, -p.rate.log2(), p.x))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Undefined(format!(
            "exponent slope needs at least 3 nonzero error rates, got {}",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Undefined("all nonzero points share one x".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(SlopeFit {
        slope,
        intercept,
        used: pts.iter().map(|p| p.2).collect(),
        residuals: pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect(),
    })
}

/// `1 - (1 - e^(-delta_max))^floor(m/2)`: error lower bound from `floor(m/2)`
/// independent pairwise tests.
pub fn kailath_bound(delta_max: f64, m: usize) -> Result<f64> {
    if !(delta_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta_max = {delta_max} must be nonnegative")));
    }
    let pairs = (m / 2) as f64;
    if pairs == 0.0 {
        return Ok(0.0);
    }
    let p = (-delta_max).exp();
    Ok(-(pairs * (-p).ln_1p()).exp_m1())
}
