//! Three routes to the rate of escape `l = lim |x_n|/n`: Monte Carlo, the
//! exact subadditive sequence `L(μⁿ)/n` on trees, and the Busemann integral
//! `l = Σ_g μ(g) ∫ β_ξ(o, g⁻¹o) dν(ξ)`.

use rayon::prelude::*;

use super::dimension::EmpiricalBoundaryMeasure;
use super::radial::RadialTable;
use super::sequence::{RateSequence, Route};
use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, DEFAULT_SUPPORT_CAP};
use crate::rng::derive_seed;
use crate::space::{busemann, SpaceModel, SpacePoint};
use crate::stats::{bootstrap_mean_se, mean, EstimateCI, BOOTSTRAP_RESAMPLES};
use crate::walker::{final_distances, WalkConfig, MAX_INVALID_FRACTION};

/// Mean of `|x_n|/n` over the trajectories of `cfg`, with a bootstrap
/// standard error.
pub fn escape_rate_mc(m: &FiniteMeasure, model: &SpaceModel, cfg: &WalkConfig) -> Result<EstimateCI> {
    let (distances, invalid) = final_distances(m, model, cfg)?;
    if invalid as f64 > MAX_INVALID_FRACTION * cfg.trajectories as f64 {
        return Err(Error::PrecisionLoss(format!(
            "{invalid} of {} trajectories lost precision",
            cfg.trajectories
        )));
    }
    let n = cfg.steps as f64;
    let rates: Vec<f64> = distances.iter().map(|d| d / n).collect();
    let seed = derive_seed(cfg.seed, "escape-bootstrap");
    Ok(EstimateCI {
        value: mean(&rates),
        std_error: bootstrap_mean_se(&rates, BOOTSTRAP_RESAMPLES, seed),
        sample_count: rates.len(),
        method: "monte_carlo".into(),
        seed: cfg.seed,
    })
}

/// `L(μⁿ)/n` for `n = 1..=n_table`, by the distance chain when the measure
/// is radial nearest-neighbour and by convolution powers otherwise.
pub fn escape_rate_exact_tree(m: &FiniteMeasure, model: &SpaceModel, n_table: usize) -> Result<RateSequence> {
    escape_rate_exact_tree_capped(m, model, n_table, DEFAULT_SUPPORT_CAP)
}

pub fn escape_rate_exact_tree_capped(
    m: &FiniteMeasure,
    model: &SpaceModel,
    n_table: usize,
    cap: usize,
) -> Result<RateSequence> {
    if !model.is_tree() {
        return Err(Error::Unsupported("exact escape rates need a tree backend".into()));
    }
    if n_table == 0 {
        return Err(Error::InvalidArgument("n_table must be >= 1".into()));
    }
    if RadialTable::radial_parameters(m, model).is_some() {
        let t = RadialTable::new(m, model, n_table)?;
        return Ok(RateSequence::new(Route::Radial, (1..=n_table).map(|n| t.mean_distance(n)).collect()));
    }
    let mut totals = Vec::with_capacity(n_table);
    let mut power = m.clone();
    for n in 1..=n_table {
        totals.push(power.first_moment(model)?);
        if n < n_table {
            power = power.convolve_capped(m, cap).map_err(|e| match e {
                Error::ResourceLimit(msg) => Error::ResourceLimit(format!(
                    "{msg} at n = {}; use a radial measure or a smaller n_table",
                    n + 1
                )),
                e => e,
            })?;
        }
    }
    Ok(RateSequence::new(Route::Convolution, totals))
}

/// `Σ_g m(g) · mean_ξ β_ξ(o, g⁻¹o)` over the empirical boundary measure.
///
/// Each sample contributes `Y_ξ = Σ_g m(g) β_ξ(o, g⁻¹o)`; the estimate is
/// the mean of `Y` with a bootstrap standard error. Samples whose depth
/// cannot resolve some `β` are dropped and counted; more than 1 % aborts.
pub fn escape_rate_busemann(
    m: &FiniteMeasure,
    model: &SpaceModel,
    nu: &EmpiricalBoundaryMeasure,
    seed: u64,
) -> Result<EstimateCI> {
    let o = model.basepoint();
    let targets: Vec<(SpacePoint, f64)> = m
        .iter()
        .map(|(g, p)| Ok((model.orbit_point(&g.inverse())?, p)))
        .collect::<Result<_>>()?;
    let values: Vec<Option<f64>> = nu
        .samples()
        .par_iter()
        .map(|s| {
            let mut y = 0.0;
            for (t, p) in &targets {
                y += p * busemann(&s.point, &o, t).ok()?;
            }
            Some(y)
        })
        .collect();
    let unresolved = values.iter().filter(|v| v.is_none()).count();
    if unresolved as f64 > MAX_INVALID_FRACTION * values.len() as f64 {
        return Err(Error::InsufficientResolution(format!(
            "{unresolved} of {} boundary samples cannot resolve the Busemann cocycle",
            values.len()
        )));
    }
    let ys: Vec<f64> = values.into_iter().flatten().collect();
    Ok(EstimateCI {
        value: mean(&ys),
        std_error: bootstrap_mean_se(&ys, BOOTSTRAP_RESAMPLES, derive_seed(seed, "busemann-bootstrap")),
        sample_count: ys.len(),
        method: "busemann_integral".into(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> SpaceModel {
        SpaceModel::free_group(2).unwrap()
    }

    #[test]
    fn dirac_escapes_at_unit_speed() {
        let model = f2();
        let da = FiniteMeasure::dirac(model.element_from_word("a").unwrap());
        let e = escape_rate_mc(&da, &model, &WalkConfig::new(50, 20, 1)).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.std_error, 0.0);
        let seq = escape_rate_exact_tree(&da, &model, 6).unwrap();
        assert!(seq.rates().iter().all(|&r| r == 1.0));
    }

    #[test]
    fn exact_sequence_starts_at_first_moment() {
        let model = f2();
        let m = FiniteMeasure::new(vec![
            (model.element_from_word("ab").unwrap(), 0.5),
            (model.element_from_word("B").unwrap(), 0.5),
        ])
        .unwrap();
        let seq = escape_rate_exact_tree(&m, &model, 1).unwrap();
        assert_eq!(seq.route, Route::Convolution);
        assert!((seq.rate(1) - m.first_moment(&model).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn srw_chain_matches_convolution() {
        let model = f2();
        let srw = FiniteMeasure::simple_random_walk(&model);
        let radial = escape_rate_exact_tree(&srw, &model, 6).unwrap();
        assert_eq!(radial.route, Route::Radial);
        let mut power = srw.clone();
        for n in 1..=6 {
            let direct = power.first_moment(&model).unwrap() / n as f64;
            assert!((radial.rate(n) - direct).abs() < 1e-12, "n = {n}");
            power = power.convolve(&srw).unwrap();
        }
        assert_eq!(radial.rate(1), 1.0);
    }

    #[test]
    fn half_plane_is_unsupported() {
        let model = SpaceModel::fuchsian(vec![crate::space::Mat2::boost(1.0)]).unwrap();
        let srw = FiniteMeasure::simple_random_walk(&model);
        assert!(matches!(escape_rate_exact_tree(&srw, &model, 3), Err(Error::Unsupported(_))));
    }
}
