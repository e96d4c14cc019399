//! Seeded sampling of random-walk trajectories `x_n = h₁⋯h_n` and of
//! approximate harmonic-measure samples obtained by truncating the walk.
//!
//! Trajectory `i` draws its increments from ChaCha stream `i` of a seed
//! derived from the master seed, so every trajectory is a pure function of
//! `(seed, i)` and batches can be computed in parallel and reduced in index
//! order.
//!
//! Half-plane walks keep the position `x_n` as a unimodular matrix and read
//! off `x_n·i` from its entries (`Im = 1/(c² + d²)`); a trajectory whose
//! point falls below `Im z = 1e-300` is marked invalid and excluded, never
//! resampled.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::rng::{derive_seed, stream_rng};
use crate::space::halfplane::MIN_IMAG;
use crate::space::{BoundaryPoint, GroupElement, Mat2, SpaceModel, TreeEnd, Word};

/// Default step cap for half-plane walks.
pub const HALF_PLANE_STEP_CAP: usize = 5000;
/// Fraction of invalid trajectories above which boundary sampling fails.
pub const MAX_INVALID_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub stride: usize,
}

impl WalkConfig {
    pub fn new(steps: usize, trajectories: usize, seed: u64) -> WalkConfig {
        WalkConfig { steps, trajectories, seed, stride: steps.max(1) }
    }

    pub fn with_stride(mut self, stride: usize) -> WalkConfig {
        self.stride = stride;
        self
    }

    pub fn validate(&self, model: &SpaceModel) -> Result<()> {
        if self.steps == 0 || self.trajectories == 0 || self.stride == 0 {
            return Err(Error::InvalidArgument(format!(
                "walk config needs steps, trajectories and stride >= 1 (got {}, {}, {})",
                self.steps, self.trajectories, self.stride
            )));
        }
        if !model.is_tree() && self.steps > HALF_PLANE_STEP_CAP {
            return Err(Error::InvalidArgument(format!(
                "half-plane walks are capped at {HALF_PLANE_STEP_CAP} steps, {} requested",
                self.steps
            )));
        }
        Ok(())
    }
}

/// One sampled trajectory, recorded every `stride` steps and at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub index: usize,
    /// Seed of the increment stream (stream id is `index`).
    pub stream_seed: u64,
    pub steps: Vec<usize>,
    pub positions: Vec<GroupElement>,
    /// `|x_n| = d(o, x_n·o)` at each recorded step.
    pub distances: Vec<f64>,
    /// Set when the walk lost precision; the recorded prefix stays valid.
    pub invalid: Option<String>,
}

impl Trajectory {
    pub fn is_valid(&self) -> bool {
        self.invalid.is_none()
    }
}

/// Inverse-CDF sampler over the canonical support ordering.
#[derive(Debug, Clone)]
pub(crate) struct IncrementSampler {
    cumulative: Vec<f64>,
}

impl IncrementSampler {
    pub(crate) fn new(m: &FiniteMeasure) -> IncrementSampler {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = m
            .masses()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        *cumulative.last_mut().unwrap() = f64::INFINITY;
        IncrementSampler { cumulative }
    }

    pub(crate) fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// Walk position specialised per backend.
#[derive(Clone)]
enum State {
    Tree(Word),
    Plane(Mat2),
}

struct Walk<'a> {
    tree_incs: Vec<Word>,
    plane_incs: Vec<Mat2>,
    sampler: IncrementSampler,
    model: &'a SpaceModel,
}

impl<'a> Walk<'a> {
    fn new(m: &FiniteMeasure, model: &'a SpaceModel) -> Result<Walk<'a>> {
        let mut tree_incs = Vec::new();
        let mut plane_incs = Vec::new();
        for g in m.support() {
            model.check(g)?;
            match g {
                GroupElement::Word(w) => tree_incs.push(w.clone()),
                GroupElement::Matrix(x) => plane_incs.push(*x),
            }
        }
        Ok(Walk { tree_incs, plane_incs, sampler: IncrementSampler::new(m), model })
    }

    fn start(&self) -> State {
        if self.model.is_tree() {
            State::Tree(Word::identity())
        } else {
            State::Plane(Mat2::IDENTITY)
        }
    }

    fn step(&self, s: &mut State, rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
        let i = self.sampler.draw(rng);
        match s {
            State::Tree(w) => w.mul_assign_right(&self.tree_incs[i]),
            State::Plane(x) => {
                *x = x.mul(&self.plane_incs[i]);
                let im = 1.0 / (x.c * x.c + x.d * x.d);
                if !(im > MIN_IMAG) || !x.is_finite() {
                    return Err(format!("Im(x_n·i) = {im:e} fell below {MIN_IMAG:e}"));
                }
            }
        }
        Ok(())
    }

    fn distance(&self, s: &State) -> f64 {
        match s {
            State::Tree(w) => w.len() as f64,
            State::Plane(x) => self.model.displacement(&GroupElement::Matrix(*x)).unwrap_or(f64::INFINITY),
        }
    }

    fn element(s: &State) -> GroupElement {
        match s {
            State::Tree(w) => GroupElement::Word(w.clone()),
            State::Plane(x) => GroupElement::Matrix(*x),
        }
    }
}

fn walk_seed(cfg: &WalkConfig) -> u64 {
    derive_seed(cfg.seed, "walk")
}

/// Samples trajectory `index` of the batch described by `cfg`.
pub fn sample_trajectory(m: &FiniteMeasure, model: &SpaceModel, cfg: &WalkConfig, index: usize) -> Result<Trajectory> {
    cfg.validate(model)?;
    if index >= cfg.trajectories {
        return Err(Error::InvalidArgument(format!(
            "trajectory index {index} outside 0..{}",
            cfg.trajectories
        )));
    }
    let walk = Walk::new(m, model)?;
    Ok(run_recorded(&walk, cfg, index))
}

fn run_recorded(walk: &Walk<'_>, cfg: &WalkConfig, index: usize) -> Trajectory {
    let stream_seed = walk_seed(cfg);
    let mut rng = stream_rng(stream_seed, index as u64);
    let mut state = walk.start();
    let mut t = Trajectory {
        index,
        stream_seed,
        steps: vec![0],
        positions: vec![Walk::element(&state)],
        distances: vec![0.0],
        invalid: None,
    };
    for n in 1..=cfg.steps {
        if let Err(e) = walk.step(&mut state, &mut rng) {
            t.invalid = Some(format!("step {n}: {e}"));
            return t;
        }
        if n % cfg.stride == 0 || n == cfg.steps {
            t.steps.push(n);
            t.positions.push(Walk::element(&state));
            t.distances.push(walk.distance(&state));
        }
    }
    t
}

/// All trajectories of a batch, in index order.
pub fn sample_trajectories(m: &FiniteMeasure, model: &SpaceModel, cfg: &WalkConfig) -> Result<Vec<Trajectory>> {
    cfg.validate(model)?;
    let walk = Walk::new(m, model)?;
    Ok((0..cfg.trajectories).into_par_iter().map(|i| run_recorded(&walk, cfg, i)).collect())
}

/// Final distances `|x_n|` of every valid trajectory, in index order, plus
/// the number of invalid trajectories. Same streams as
/// [`sample_trajectories`], without recording positions.
pub fn final_distances(m: &FiniteMeasure, model: &SpaceModel, cfg: &WalkConfig) -> Result<(Vec<f64>, usize)> {
    cfg.validate(model)?;
    let walk = Walk::new(m, model)?;
    let seed = walk_seed(cfg);
    let out: Vec<Option<f64>> = (0..cfg.trajectories)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut s = walk.start();
            for _ in 0..cfg.steps {
                walk.step(&mut s, &mut rng).ok()?;
            }
            Some(walk.distance(&s))
        })
        .collect();
    let invalid = out.iter().filter(|d| d.is_none()).count();
    Ok((out.into_iter().flatten().collect(), invalid))
}

/// Parameters of harmonic-measure sampling by truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConfig {
    pub samples: usize,
    /// Truncation depth `n_max` (walk length).
    pub steps: usize,
    pub seed: u64,
    /// Maximal stored prefix length on trees.
    pub depth_cap: usize,
    /// Minimal median [`BoundarySample::quality`].
    pub resolution_floor: f64,
}

impl BoundaryConfig {
    pub fn new(samples: usize, steps: usize, seed: u64) -> BoundaryConfig {
        BoundaryConfig { samples, steps, seed, depth_cap: 64, resolution_floor: 8.0 }
    }
}

/// Default truncation depth `max(200, ⌈40 / l̂⌉)` for a pilot escape rate.
pub fn default_truncation(pilot_rate: f64) -> usize {
    if !(pilot_rate > 0.0) {
        return 200;
    }
    200usize.max((40.0 / pilot_rate).ceil() as usize)
}

/// A truncated-walk approximation of a harmonic-measure sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    pub point: BoundaryPoint,
    /// Walk length `n_max` used.
    pub truncation: usize,
    /// Tree: confluence depth of `x_{n_max}` with `x_{n_max/2}`.
    /// Half-plane: `Im(x_{n_max}·i)`.
    pub resolution: f64,
}

impl BoundarySample {
    /// Resolution on a larger-is-better scale: the confluence depth on
    /// trees, `−ln Im z` on the half-plane.
    pub fn quality(&self) -> f64 {
        match self.point {
            BoundaryPoint::Tree(_) => self.resolution,
            _ => -self.resolution.ln(),
        }
    }
}

/// `N` approximate samples of the harmonic measure.
///
/// Fails when more than 1 % of the walks are invalid or when the median
/// quality is below the configured floor.
pub fn sample_boundary(m: &FiniteMeasure, model: &SpaceModel, cfg: &BoundaryConfig) -> Result<Vec<BoundarySample>> {
    let wc = WalkConfig::new(cfg.steps, cfg.samples, cfg.seed);
    wc.validate(model)?;
    let walk = Walk::new(m, model)?;
    let seed = derive_seed(cfg.seed, "boundary");
    let half = cfg.steps / 2;
    let results: Vec<std::result::Result<BoundarySample, String>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut s = walk.start();
            let mut mid = None;
            for n in 1..=cfg.steps {
                walk.step(&mut s, &mut rng)?;
                if n == half {
                    mid = Some(s.clone());
                }
            }
            finish_sample(&s, mid.as_ref(), cfg)
        })
        .collect();
    let invalid: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    if invalid.len() as f64 > MAX_INVALID_FRACTION * cfg.samples as f64 {
        return Err(Error::PrecisionLoss(format!(
            "{} of {} boundary walks invalid (first: {})",
            invalid.len(),
            cfg.samples,
            invalid[0]
        )));
    }
    let samples: Vec<BoundarySample> = results.into_iter().filter_map(|r| r.ok()).collect();
    let mut q: Vec<f64> = samples.iter().map(|s| s.quality()).collect();
    q.sort_by(f64::total_cmp);
    let median = q[q.len() / 2];
    if median < cfg.resolution_floor {
        return Err(Error::InsufficientResolution(format!(
            "median sample resolution {median} below floor {} at n_max = {}",
            cfg.resolution_floor, cfg.steps
        )));
    }
    Ok(samples)
}

fn finish_sample(s: &State, mid: Option<&State>, cfg: &BoundaryConfig) -> std::result::Result<BoundarySample, String> {
    match s {
        State::Tree(w) => {
            let confluence = match mid {
                Some(State::Tree(m)) => w.common_prefix_len(m),
                _ => w.len(),
            };
            let depth = confluence.min(cfg.depth_cap);
            let end = TreeEnd::prefix(w.prefix(depth)).map_err(|_| "walk did not leave the root cylinder".to_string())?;
            Ok(BoundarySample { point: BoundaryPoint::Tree(end), truncation: cfg.steps, resolution: confluence as f64 })
        }
        State::Plane(x) => {
            let z = x.act_point(Complex64::new(0.0, 1.0)).map_err(|e| e.to_string())?;
            Ok(BoundarySample { point: BoundaryPoint::Real(z.re), truncation: cfg.steps, resolution: z.im })
        }
    }
}
