//! Small statistical toolkit: seeded bootstrap, least-squares fits, trend
//! tests and binomial intervals.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::rng::stream_rng;

/// Default number of bootstrap resamples.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// A point estimate with its standard error and provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateCI {
    pub value: f64,
    pub std_error: f64,
    pub sample_count: usize,
    pub method: String,
    pub seed: u64,
}

impl EstimateCI {
    pub fn exact(value: f64, method: &str) -> EstimateCI {
        EstimateCI { value, std_error: 0.0, sample_count: 0, method: method.to_string(), seed: 0 }
    }

    /// `|self − other|` in units of the joint standard error
    /// `sqrt(σ₁² + σ₂²)`; infinite when both errors vanish and values differ.
    pub fn z_distance(&self, other: &EstimateCI) -> f64 {
        let joint = self.std_error.hypot(other.std_error);
        let diff = (self.value - other.value).abs();
        if joint > 0.0 {
            diff / joint
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (denominator `n − 1`).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Linear-interpolated quantile of unsorted data, `q ∈ [0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// `(q₁, q₃)`.
pub fn quartiles(xs: &[f64]) -> (f64, f64) {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    (quantile_sorted(&v, 0.25), quantile_sorted(&v, 0.75))
}

/// Bootstrap standard error of `statistic` over resampled indices
/// `0..n`. Resample `b` draws from ChaCha stream `b` of `seed`.
pub fn bootstrap_std_error<F>(n: usize, resamples: usize, seed: u64, statistic: F) -> f64
where
    F: Fn(&[usize]) -> f64,
{
    if n < 2 || resamples < 2 {
        return 0.0;
    }
    let mut idx = vec![0usize; n];
    let values: Vec<f64> = (0..resamples)
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            for slot in idx.iter_mut() {
                *slot = rng.random_range(0..n);
            }
            statistic(&idx)
        })
        .filter(|v| v.is_finite())
        .collect();
    std_dev(&values)
}

/// Bootstrap standard error of the mean.
pub fn bootstrap_mean_se(xs: &[f64], resamples: usize, seed: u64) -> f64 {
    bootstrap_std_error(xs.len(), resamples, seed, |idx| idx.iter().map(|&i| xs[i]).sum::<f64>() / idx.len() as f64)
}

/// Ordinary least squares `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    pub r_squared: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    pub n: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_se = if n > 2 { (sse / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Some(LinearFit { slope, intercept, slope_se, r_squared, rms_residual: (sse / n as f64).sqrt(), n })
}

/// Two-sided p-value of the null hypothesis "slope = 0". An exact fit with
/// zero slope gives 1, an exact fit with nonzero slope gives 0.
pub fn slope_p_value(fit: &LinearFit) -> f64 {
    if fit.n < 3 {
        return 1.0;
    }
    if fit.slope_se == 0.0 {
        return if fit.slope.abs() < 1e-12 { 1.0 } else { 0.0 };
    }
    let t = fit.slope / fit.slope_se;
    let dist = StudentsT::new(0.0, 1.0, (fit.n - 2) as f64).expect("n > 2");
    2.0 * (1.0 - dist.cdf(t.abs()))
}

/// Mann–Kendall trend test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannKendall {
    pub s: i64,
    pub z: f64,
    /// One-sided p-value against an increasing trend.
    pub p_increasing: f64,
}

pub fn mann_kendall(ys: &[f64]) -> MannKendall {
    let n = ys.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match ys[j].partial_cmp(&ys[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    // tie-corrected variance
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        ties += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j + 1;
    }
    let nf = n as f64;
    let var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - ties) / 18.0;
    let z = if var <= 0.0 {
        0.0
    } else if s > 0 {
        (s as f64 - 1.0) / var.sqrt()
    } else if s < 0 {
        (s as f64 + 1.0) / var.sqrt()
    } else {
        0.0
    };
    let normal = Normal::standard();
    MannKendall { s, z, p_increasing: 1.0 - normal.cdf(z) }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, n: usize, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let center = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}
