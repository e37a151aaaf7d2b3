//! Small statistics toolkit: means with standard errors, batch means, fits.

use serde::{Deserialize, Serialize};

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn new(value: f64, se: f64) -> Self {
        Self { value, se }
    }
    pub fn exact(value: f64) -> Self {
        Self { value, se: 0.0 }
    }
    /// Number of combined standard errors separating two estimates.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let s = (self.se * self.se + other.se * other.se).sqrt();
        if s == 0.0 {
            if self.value == other.value {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value - other.value).abs() / s
        }
    }
    pub fn scale(&self, c: f64) -> Self {
        Self { value: c * self.value, se: c.abs() * self.se }
    }
}

/// Sample mean and standard error of the mean of i.i.d. values.
pub fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len();
    if n == 0 {
        return Estimate::new(f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Estimate::new(m, f64::INFINITY);
    }
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    Estimate::new(m, (v / n as f64).sqrt())
}

pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Batch-means estimate for a correlated series split into `batches` blocks.
pub fn batch_means(xs: &[f64], batches: usize) -> Estimate {
    let b = batches.max(2).min(xs.len());
    let len = xs.len() / b;
    if len == 0 {
        return mean_se(xs);
    }
    let means: Vec<f64> = (0..b).map(|i| xs[i * len..(i + 1) * len].iter().sum::<f64>() / len as f64).collect();
    let total = xs[..b * len].iter().sum::<f64>() / (b * len) as f64;
    Estimate::new(total, mean_se(&means).se)
}

/// Integrated autocorrelation time with Sokal's adaptive window (`c = 5`).
pub fn autocorr_time(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return 1.0;
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    let c0 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 1.0;
    }
    let mut tau = 1.0;
    for lag in 1..n / 2 {
        let c = xs[..n - lag].iter().zip(&xs[lag..]).map(|(a, b)| (a - m) * (b - m)).sum::<f64>() / n as f64;
        tau += 2.0 * c / c0;
        if lag as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

/// Least-squares line `y = a + b x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_se: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - rss / syy };
    let slope_se = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    LineFit { slope, intercept, r_squared, slope_se, points: x.len() }
}

/// Fit of `log y` against `log x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> LineFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Weighted least squares with weights `1/se²`; the slope SE comes from the weights.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], se: &[f64]) -> LineFit {
    let w: Vec<f64> = se.iter().map(|s| 1.0 / (s * s).max(1e-300)).collect();
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(&w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let my = y.iter().zip(&w).map(|(b, w)| b * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(&w).map(|(a, w)| w * (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).zip(&w).map(|((a, b), w)| w * (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().zip(&w).map(|(b, w)| w * (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).zip(&w).map(|((a, b), w)| w * (b - intercept - slope * a).powi(2)).sum();
    LineFit {
        slope,
        intercept,
        r_squared: if syy == 0.0 { 1.0 } else { 1.0 - rss / syy },
        slope_se: (1.0 / sxx).sqrt(),
        points: x.len(),
    }
}

/// Log-log fit of MC estimates using delta-method errors `se/value`.
pub fn loglog_fit_estimates(x: &[f64], y: &[Estimate]) -> LineFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|e| e.value.ln()).collect();
    let se: Vec<f64> = y.iter().map(|e| (e.se / e.value).abs()).collect();
    if se.iter().all(|s| *s > 0.0 && s.is_finite()) {
        weighted_linear_fit(&lx, &ly, &se)
    } else {
        linear_fit(&lx, &ly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(2.5)).collect();
        let f = loglog_fit(&x, &y);
        assert!((f.slope - 2.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_se_small() {
        let e = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.value, 2.5);
        assert!((e.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}
