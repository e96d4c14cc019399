//! The `μ_k` sweep: bounded entropy against a diverging escape rate.

use serde::Serialize;

use super::checks::{convexity_check, open_set_mass, BoundaryRegion, MassEstimate};
use super::dimension::EmpiricalBoundaryMeasure;
use super::entropy::{entropy_upper_bound_with, EntropyBudget};
use super::escape::escape_rate_mc;
use crate::error::{Error, Result};
use crate::measure::MuKFamily;
use crate::rng::derive_seed;
use crate::space::SpaceModel;
use crate::stats::{linear_fit, EstimateCI, LinearFit};
use crate::walker::{sample_boundary, BoundaryConfig, WalkConfig};

/// Sub-estimator settings for [`ratio_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioConfig {
    pub steps: usize,
    pub trajectories: usize,
    pub boundary_samples: usize,
    pub boundary_steps: usize,
    pub entropy: EntropyBudget,
    /// Target for the ratio at the largest `k`.
    pub epsilon: f64,
    /// Region whose `ν̂_k`-mass is reported per row (99 % Wilson interval).
    pub mass_region: Option<BoundaryRegion>,
    pub seed: u64,
}

impl RatioConfig {
    pub fn new(seed: u64) -> RatioConfig {
        RatioConfig {
            steps: 1000,
            trajectories: 1000,
            boundary_samples: 2000,
            boundary_steps: 200,
            entropy: EntropyBudget { max_n: 8, support_cap: 200_000 },
            epsilon: 0.15,
            mass_region: None,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub k: u32,
    /// `H(μ_k)`.
    pub entropy: f64,
    /// Certified upper bound on `h(μ_k)`.
    pub h_bound: f64,
    /// Convolution power the bound was taken at.
    pub h_bound_n: usize,
    pub escape: EstimateCI,
    /// `¼ · mean_ξ [β_ξ(o, γ_k o) + β_ξ(o, γ_{−k} o)]` under `ν̂_k`.
    pub busemann_lower: f64,
    /// Minimum of the convexity bracket under `ν̂_k`.
    pub convexity_min: f64,
    /// `h_bound / l̂`.
    pub ratio: f64,
    pub region_mass: Option<MassEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
    pub entropy_ceiling: f64,
    /// Affine fit of `l̂` against `k`.
    pub escape_fit: Option<LinearFit>,
    /// Ratio nonincreasing from `k = 2` on.
    pub monotone_from_k2: bool,
    /// Ratio at the largest `k` below `epsilon`.
    pub final_below_target: bool,
}

/// For each `k` of the grid: entropy bound, Monte Carlo escape rate,
/// Busemann lower bound and their ratio.
pub fn ratio_experiment(fam: &MuKFamily, model: &SpaceModel, k_grid: &[u32], cfg: &RatioConfig) -> Result<RatioTable> {
    if k_grid.is_empty() || k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("k grid must be nonempty and strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let mu = fam.make_mu_k(k)?;
        let seed = derive_seed(cfg.seed, &format!("mu_k/{k}"));
        let bound = entropy_upper_bound_with(&mu, cfg.entropy);
        let escape = escape_rate_mc(&mu, model, &WalkConfig::new(cfg.steps, cfg.trajectories, seed))?;
        let mut bcfg = BoundaryConfig::new(cfg.boundary_samples, cfg.boundary_steps, seed);
        bcfg.resolution_floor = 0.0;
        let nu = EmpiricalBoundaryMeasure::new(sample_boundary(&mu, model, &bcfg)?, model.visual_base())?;
        let bracket = convexity_check(fam, model, &nu, k)?;
        let region_mass = cfg.mass_region.as_ref().map(|r| open_set_mass(&nu, r, 0.99)).transpose()?;
        rows.push(RatioRow {
            k,
            entropy: mu.entropy(),
            h_bound: bound.value,
            h_bound_n: bound.n_reached,
            ratio: bound.value / escape.value,
            escape,
            busemann_lower: 0.25 * bracket.mean,
            convexity_min: bracket.min,
            region_mass,
        });
    }
    let ks: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let ls: Vec<f64> = rows.iter().map(|r| r.escape.value).collect();
    let tail: Vec<f64> = rows.iter().filter(|r| r.k >= 2).map(|r| r.ratio).collect();
    let last = rows.last().expect("nonempty grid");
    Ok(RatioTable {
        entropy_ceiling: fam.entropy_ceiling(),
        escape_fit: linear_fit(&ks, &ls),
        monotone_from_k2: tail.windows(2).all(|w| w[1] <= w[0]),
        final_below_target: last.ratio < cfg.epsilon,
        rows,
    })
}
