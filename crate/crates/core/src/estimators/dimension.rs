//! Dimension of an empirical boundary measure from ball masses in the
//! visual quasi-metric `ρ(ξ, η) = a^{−(ξ|η)}`.
//!
//! Radii are `r_m = a^{−m}`, so the closed ball `B(ξ, r_m)` is
//! `{η : (ξ|η) ≥ m}`; on trees this is exactly the depth-`m` cylinder of
//! `ξ`. Ball counts are taken against every sample, for a seeded subsample
//! of centers.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::space::halfplane::boundary_overlap;
use crate::space::{BoundaryPoint, Letter, TreeEnd};
use crate::stats::{bootstrap_std_error, linear_fit, quartiles, EstimateCI, LinearFit, BOOTSTRAP_RESAMPLES};
use crate::walker::BoundarySample;

/// Boundary samples with the visual base used to measure them.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalBoundaryMeasure {
    samples: Vec<BoundarySample>,
    visual_base: f64,
}

impl EmpiricalBoundaryMeasure {
    pub fn new(samples: Vec<BoundarySample>, visual_base: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empirical boundary measure needs samples".into()));
        }
        if !(visual_base > 1.0) {
            return Err(Error::InvalidArgument(format!("visual base {visual_base} must exceed 1")));
        }
        let tree = samples[0].point.as_tree().is_some();
        if samples.iter().any(|s| s.point.as_tree().is_some() != tree) {
            return Err(Error::BackendMismatch("boundary samples from different backends".into()));
        }
        Ok(EmpiricalBoundaryMeasure { samples, visual_base })
    }

    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn visual_base(&self) -> f64 {
        self.visual_base
    }

    pub fn is_tree(&self) -> bool {
        self.samples[0].point.as_tree().is_some()
    }

    /// Radii exponents `1..=M`, with `M` the largest depth every tree sample
    /// resolves (at most 64), or 40 on the half-plane.
    pub fn default_exponents(&self) -> Vec<u32> {
        let max = if self.is_tree() {
            let mut depths: Vec<usize> =
                self.samples.iter().map(|s| s.point.as_tree().unwrap().depth().unwrap_or(64)).collect();
            depths.sort_unstable();
            depths[depths.len() / 100].clamp(1, 64) as u32
        } else {
            40
        };
        (1..=max).collect()
    }
}

/// Parameters shared by both dimension estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionConfig {
    /// Increasing radius exponents `m` (radius `a^{−m}`).
    pub exponents: Vec<u32>,
    pub max_centers: usize,
    pub min_samples: usize,
    /// Minimal average number of other samples per ball.
    pub min_ball_count: f64,
    pub max_rms_residual: f64,
    pub min_radii: usize,
    /// Largest fraction of centers allowed to have no scaling window.
    pub max_failed_fraction: f64,
    pub seed: u64,
}

impl DimensionConfig {
    pub fn new(exponents: Vec<u32>, seed: u64) -> DimensionConfig {
        DimensionConfig {
            exponents,
            max_centers: 2000,
            min_samples: 10_000,
            min_ball_count: 30.0,
            max_rms_residual: 0.05,
            min_radii: 5,
            max_failed_fraction: 0.2,
            seed,
        }
    }

    pub fn for_measure(nu: &EmpiricalBoundaryMeasure, seed: u64) -> DimensionConfig {
        DimensionConfig::new(nu.default_exponents(), seed)
    }
}

/// Per-center ball counts (other samples only).
#[derive(Debug, Clone, PartialEq)]
pub struct BallCounts {
    pub exponents: Vec<u32>,
    pub centers: Vec<usize>,
    /// `counts[c][m]` for center `c` and exponent index `m`.
    pub counts: Vec<Vec<u32>>,
    pub total: usize,
}

impl BallCounts {
    /// Average count per ball at each exponent.
    pub fn average_counts(&self) -> Vec<f64> {
        (0..self.exponents.len())
            .map(|m| self.counts.iter().map(|c| c[m] as f64).sum::<f64>() / self.counts.len() as f64)
            .collect()
    }

    fn log_radii(&self, a: f64) -> Vec<f64> {
        self.exponents.iter().map(|&m| -(m as f64) * a.ln()).collect()
    }
}

fn pick_centers(n: usize, max: usize, seed: u64) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    let mut rng = stream_rng(derive_seed(seed, "dimension-centers"), 0);
    let mut v = sample(&mut rng, n, max).into_vec();
    v.sort_unstable();
    v
}

fn tree_letters(e: &TreeEnd, depth: usize) -> Vec<Letter> {
    match e.depth() {
        Some(_) => e.head().letters().to_vec(),
        None => e.prefix_word(depth).expect("exact ends have every depth").letters().to_vec(),
    }
}

/// Counts `#{j ≠ i : (ξ_i|ξ_j) ≥ m}` for every center `i` and exponent `m`.
pub fn ball_counts(nu: &EmpiricalBoundaryMeasure, exponents: &[u32], centers: Vec<usize>) -> BallCounts {
    let counts = if nu.is_tree() { tree_counts(nu, exponents, &centers) } else { plane_counts(nu, exponents, &centers) };
    BallCounts { exponents: exponents.to_vec(), centers, counts, total: nu.len() }
}

fn tree_counts(nu: &EmpiricalBoundaryMeasure, exponents: &[u32], centers: &[usize]) -> Vec<Vec<u32>> {
    let depth = exponents.iter().copied().max().unwrap_or(0) as usize + 1;
    let words: Vec<Vec<Letter>> =
        nu.samples.iter().map(|s| tree_letters(s.point.as_tree().unwrap(), depth)).collect();
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&i, &j| words[i].cmp(&words[j]).then(i.cmp(&j)));
    let mut rank = vec![0usize; words.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos;
    }
    // lcp[p] = common prefix of the samples at sorted positions p − 1 and p
    let lcp: Vec<usize> = (0..order.len())
        .map(|p| {
            if p == 0 {
                0
            } else {
                let (x, y) = (&words[order[p - 1]], &words[order[p]]);
                x.iter().zip(y).take_while(|(a, b)| a == b).count()
            }
        })
        .collect();
    let per_exponent: Vec<Vec<u32>> = exponents
        .par_iter()
        .map(|&m| {
            let m = m as usize;
            let mut size = vec![0u32; order.len()];
            let mut start = 0;
            for p in 1..=order.len() {
                if p == order.len() || lcp[p] < m {
                    for s in &mut size[start..p] {
                        *s = (p - start) as u32;
                    }
                    start = p;
                }
            }
            size
        })
        .collect();
    centers
        .iter()
        .map(|&i| per_exponent.iter().map(|sizes| sizes[rank[i]] - 1).collect())
        .collect()
}

fn plane_counts(nu: &EmpiricalBoundaryMeasure, exponents: &[u32], centers: &[usize]) -> Vec<Vec<u32>> {
    let pts: Vec<Option<f64>> = nu
        .samples
        .iter()
        .map(|s| match s.point {
            BoundaryPoint::Real(x) => Some(x),
            _ => None,
        })
        .collect();
    let top = exponents.iter().copied().max().unwrap_or(0) as usize;
    centers
        .par_iter()
        .map(|&i| {
            // hist[t] = #{j : floor((ξ_i|ξ_j)) = t}, with t capped at `top`
            let mut hist = vec![0u32; top + 1];
            for (j, &q) in pts.iter().enumerate() {
                if j == i {
                    continue;
                }
                let overlap = boundary_overlap(pts[i], q);
                let product = if overlap > 0.0 { -overlap.ln() } else { f64::INFINITY };
                let t = if product >= top as f64 { top } else { product.max(0.0).floor() as usize };
                hist[t] += 1;
            }
            let mut at_least = vec![0u32; top + 2];
            for t in (0..=top).rev() {
                at_least[t] = at_least[t + 1] + hist[t];
            }
            exponents.iter().map(|&m| at_least[m as usize]).collect()
        })
        .collect()
}

/// Running sums for O(1) least squares on contiguous windows.
struct Prefix {
    n: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    xx: Vec<f64>,
    xy: Vec<f64>,
    yy: Vec<f64>,
}

impl Prefix {
    fn new(xs: &[f64], ys: &[f64]) -> Prefix {
        let mut p = Prefix { n: vec![0.0], x: vec![0.0], y: vec![0.0], xx: vec![0.0], xy: vec![0.0], yy: vec![0.0] };
        for (x, y) in xs.iter().zip(ys) {
            p.n.push(p.n.last().unwrap() + 1.0);
            p.x.push(p.x.last().unwrap() + x);
            p.y.push(p.y.last().unwrap() + y);
            p.xx.push(p.xx.last().unwrap() + x * x);
            p.xy.push(p.xy.last().unwrap() + x * y);
            p.yy.push(p.yy.last().unwrap() + y * y);
        }
        p
    }

    /// `(slope, rms residual)` on `[lo, hi)`.
    fn fit(&self, lo: usize, hi: usize) -> (f64, f64) {
        let d = |v: &Vec<f64>| v[hi] - v[lo];
        let n = d(&self.n);
        let (sx, sy) = (d(&self.x), d(&self.y));
        let sxx = d(&self.xx) - sx * sx / n;
        let sxy = d(&self.xy) - sx * sy / n;
        let syy = d(&self.yy) - sy * sy / n;
        let slope = sxy / sxx;
        let sse = (syy - slope * sxy).max(0.0);
        (slope, (sse / n).sqrt())
    }
}

/// A fitted scaling window `[lo, hi)` in exponent-index space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingWindow {
    pub lo: usize,
    pub hi: usize,
    pub slope: f64,
    pub rms_residual: f64,
}

/// Widest window of at least `min_len` usable points with RMS residual
/// below `max_rms`; among equally wide windows the one at smaller radii.
fn best_window(xs: &[f64], ys: &[f64], usable: &[bool], min_len: usize, max_rms: f64) -> Option<ScalingWindow> {
    let n = xs.len();
    let prefix = Prefix::new(xs, &ys.iter().map(|y| if y.is_finite() { *y } else { 0.0 }).collect::<Vec<_>>());
    // longest usable run ending at each index
    let mut run = vec![0usize; n];
    for i in 0..n {
        run[i] = if usable[i] { if i > 0 { run[i - 1] + 1 } else { 1 } } else { 0 };
    }
    for len in (min_len..=n).rev() {
        for hi in (len..=n).rev() {
            if run[hi - 1] < len {
                continue;
            }
            let lo = hi - len;
            let (slope, rms) = prefix.fit(lo, hi);
            if rms < max_rms && slope.is_finite() {
                return Some(ScalingWindow { lo, hi, slope, rms_residual: rms });
            }
        }
    }
    None
}

/// Exponent indices whose balls hold enough samples on average.
fn admissible(counts: &BallCounts, cfg: &DimensionConfig) -> Vec<bool> {
    counts.average_counts().iter().map(|&c| c >= cfg.min_ball_count).collect()
}

fn check_size(nu: &EmpiricalBoundaryMeasure, cfg: &DimensionConfig) -> Result<()> {
    if nu.len() < cfg.min_samples {
        return Err(Error::InvalidArgument(format!(
            "dimension estimators need at least {} samples, got {}",
            cfg.min_samples,
            nu.len()
        )));
    }
    if cfg.exponents.len() < cfg.min_radii || cfg.exponents.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radius exponents must be increasing with enough entries".into()));
    }
    Ok(())
}

/// Summary of per-center local slopes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseDimension {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Bootstrap standard error of the median.
    pub std_error: f64,
    pub centers: usize,
    pub failed_centers: usize,
    pub slopes: Vec<f64>,
}

impl PointwiseDimension {
    pub fn estimate(&self, seed: u64) -> EstimateCI {
        EstimateCI {
            value: self.median,
            std_error: self.std_error,
            sample_count: self.slopes.len(),
            method: "pointwise_median".into(),
            seed,
        }
    }
}

/// Local dimension `log ν̂B(ξ, r) / log r` at a subsample of centers, each
/// fitted over its own widest scaling window.
pub fn pointwise_dimension(nu: &EmpiricalBoundaryMeasure, cfg: &DimensionConfig) -> Result<PointwiseDimension> {
    check_size(nu, cfg)?;
    let centers = pick_centers(nu.len(), cfg.max_centers, cfg.seed);
    let counts = ball_counts(nu, &cfg.exponents, centers);
    pointwise_from_counts(&counts, nu.visual_base(), cfg)
}

pub fn pointwise_from_counts(counts: &BallCounts, a: f64, cfg: &DimensionConfig) -> Result<PointwiseDimension> {
    let xs = counts.log_radii(a);
    let ok = admissible(counts, cfg);
    let others = (counts.total - 1) as f64;
    let slopes: Vec<Option<f64>> = counts
        .counts
        .par_iter()
        .map(|c| {
            let ys: Vec<f64> = c.iter().map(|&k| (k as f64 / others).ln()).collect();
            let usable: Vec<bool> = ok.iter().zip(c).map(|(&a, &k)| a && k > 0).collect();
            best_window(&xs, &ys, &usable, cfg.min_radii, cfg.max_rms_residual).map(|w| w.slope)
        })
        .collect();
    let centers = slopes.len();
    let slopes: Vec<f64> = slopes.into_iter().flatten().collect();
    let failed = centers - slopes.len();
    if failed as f64 > cfg.max_failed_fraction * centers as f64 {
        return Err(Error::EstimatorFailure(format!(
            "{failed} of {centers} centers have no scaling window (≥ {} radii, rms < {}, ≥ {} points per ball)",
            cfg.min_radii, cfg.max_rms_residual, cfg.min_ball_count
        )));
    }
    let (q1, q3) = quartiles(&slopes);
    let median = crate::stats::median(&slopes);
    let std_error = bootstrap_std_error(slopes.len(), BOOTSTRAP_RESAMPLES, derive_seed(cfg.seed, "pointwise"), |idx| {
        crate::stats::median(&idx.iter().map(|&i| slopes[i]).collect::<Vec<_>>())
    });
    Ok(PointwiseDimension { median, q1, q3, std_error, centers, failed_centers: failed, slopes })
}

/// Grassberger–Procaccia estimate with its fitted window and curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationDimension {
    pub estimate: EstimateCI,
    pub window: ScalingWindow,
    /// `(m, C(a^{−m}))` over the whole grid.
    pub curve: Vec<(u32, f64)>,
    pub fit: LinearFit,
}

/// Slope of `log C(r)` against `log r`, where `C(r)` is the fraction of
/// (center, sample) pairs within `ρ ≤ r`.
pub fn correlation_dimension(nu: &EmpiricalBoundaryMeasure, cfg: &DimensionConfig) -> Result<CorrelationDimension> {
    check_size(nu, cfg)?;
    let centers = pick_centers(nu.len(), cfg.max_centers, cfg.seed);
    let counts = ball_counts(nu, &cfg.exponents, centers);
    correlation_from_counts(&counts, nu.visual_base(), cfg)
}

fn correlation_curve(counts: &BallCounts, rows: &[usize]) -> Vec<f64> {
    let others = (counts.total - 1) as f64;
    (0..counts.exponents.len())
        .map(|m| rows.iter().map(|&r| counts.counts[r][m] as f64).sum::<f64>() / (rows.len() as f64 * others))
        .collect()
}

pub fn correlation_from_counts(counts: &BallCounts, a: f64, cfg: &DimensionConfig) -> Result<CorrelationDimension> {
    let xs = counts.log_radii(a);
    let all: Vec<usize> = (0..counts.counts.len()).collect();
    let c = correlation_curve(counts, &all);
    let ys: Vec<f64> = c.iter().map(|v| v.ln()).collect();
    let usable: Vec<bool> = admissible(counts, cfg).iter().zip(&c).map(|(&a, &v)| a && v > 0.0).collect();
    let window = best_window(&xs, &ys, &usable, cfg.min_radii, cfg.max_rms_residual).ok_or_else(|| {
        Error::EstimatorFailure(format!(
            "correlation integral has no scaling window (≥ {} radii, rms < {}, ≥ {} points per ball)",
            cfg.min_radii, cfg.max_rms_residual, cfg.min_ball_count
        ))
    })?;
    let fit = linear_fit(&xs[window.lo..window.hi], &ys[window.lo..window.hi]).expect("window has >= 2 radii");
    let std_error = bootstrap_std_error(all.len(), BOOTSTRAP_RESAMPLES, derive_seed(cfg.seed, "correlation"), |idx| {
        let c = correlation_curve(counts, idx);
        let ys: Vec<f64> = c[window.lo..window.hi].iter().map(|v| v.ln()).collect();
        linear_fit(&xs[window.lo..window.hi], &ys).map_or(f64::NAN, |f| f.slope)
    });
    Ok(CorrelationDimension {
        estimate: EstimateCI {
            value: window.slope,
            std_error,
            sample_count: counts.counts.len(),
            method: "correlation_integral".into(),
            seed: cfg.seed,
        },
        window,
        curve: counts.exponents.iter().copied().zip(c).collect(),
        fit,
    })
}
