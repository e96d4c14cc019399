//! Inequality checks: the dimension bound `dim ν ≤ h/(l log a)`, the
//! volume bound `h ≤ l v`, the convexity bracket
//! `β_ξ(o, γ_k o) + β_ξ(o, γ_{−k} o)`, the uniform bound on `(ξ|γ_{±k})`
//! away from `γ^±`, and empirical masses of open sets.

use rayon::prelude::*;
use serde::Serialize;

use super::dimension::EmpiricalBoundaryMeasure;
use crate::error::{Error, Result};
use crate::measure::MuKFamily;
use crate::space::{busemann, gromov_product, BoundaryPoint, SpaceModel, SpacePoint, Word};
use crate::stats::{linear_fit, slope_p_value, wilson_interval, EstimateCI, LinearFit};
use crate::walker::MAX_INVALID_FRACTION;

/// A boundary region given by cylinders (trees) or closed intervals of the
/// extended real line (half-plane), possibly complemented.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BoundaryRegion {
    Whole,
    /// Union of the cylinders of the given reduced prefixes.
    Cylinders(Vec<Word>),
    /// Union of closed intervals; infinite endpoints include `∞`.
    Intervals(Vec<(f64, f64)>),
    Complement(Box<BoundaryRegion>),
}

impl BoundaryRegion {
    pub fn cylinders(words: &[&str]) -> Result<BoundaryRegion> {
        Ok(BoundaryRegion::Cylinders(words.iter().map(|w| Word::parse(w)).collect::<Result<_>>()?))
    }

    pub fn complement(self) -> BoundaryRegion {
        BoundaryRegion::Complement(Box::new(self))
    }

    /// Membership; an error when a truncated end is too shallow to decide.
    pub fn contains(&self, xi: &BoundaryPoint) -> Result<bool> {
        match (self, xi) {
            (BoundaryRegion::Whole, _) => Ok(true),
            (BoundaryRegion::Complement(r), _) => Ok(!r.contains(xi)?),
            (BoundaryRegion::Cylinders(ws), BoundaryPoint::Tree(e)) => {
                for w in ws {
                    if e.prefix_word(w.len())? == *w {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            (BoundaryRegion::Intervals(iv), BoundaryPoint::Real(x)) => {
                Ok(iv.iter().any(|&(lo, hi)| lo <= *x && *x <= hi))
            }
            (BoundaryRegion::Intervals(iv), BoundaryPoint::Infinity) => {
                Ok(iv.iter().any(|&(lo, hi)| lo == f64::NEG_INFINITY || hi == f64::INFINITY))
            }
            _ => Err(Error::BackendMismatch("region and boundary point belong to different backends".into())),
        }
    }
}

/// Empirical mass of a region with a Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassEstimate {
    pub mass: f64,
    pub lo: f64,
    pub hi: f64,
    pub confidence: f64,
    pub hits: usize,
    pub n: usize,
    /// Samples too shallow to decide membership (excluded).
    pub unresolved: usize,
}

pub fn open_set_mass(nu: &EmpiricalBoundaryMeasure, region: &BoundaryRegion, confidence: f64) -> Result<MassEstimate> {
    let mut hits = 0;
    let mut unresolved = 0;
    for s in nu.samples() {
        match region.contains(&s.point) {
            Ok(true) => hits += 1,
            Ok(false) => {}
            Err(Error::InsufficientResolution(_)) => unresolved += 1,
            Err(e) => return Err(e),
        }
    }
    let n = nu.len() - unresolved;
    let (lo, hi) = wilson_interval(hits, n, confidence);
    Ok(MassEstimate { mass: hits as f64 / n.max(1) as f64, lo, hi, confidence, hits, n, unresolved })
}

/// Result of the convexity bracket over boundary samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub k: u32,
    pub min: f64,
    pub mean: f64,
    pub evaluated: usize,
    pub unresolved: usize,
}

/// `min_ξ β_ξ(o, γ₀^k o) + β_ξ(o, γ₀^{−k} o)` over the samples. The mean
/// of the bracket, divided by 4, is the lower bound on `l(μ_k)` from the
/// `δ_{γ₀^{±k}}` part of `μ_k`.
pub fn convexity_check(
    fam: &MuKFamily,
    model: &SpaceModel,
    nu: &EmpiricalBoundaryMeasure,
    k: u32,
) -> Result<ConvexityReport> {
    let o = model.basepoint();
    let plus = model.orbit_point(&fam.gamma0().pow(k as i64))?;
    let minus = model.orbit_point(&fam.gamma0().pow(-(k as i64)))?;
    let values: Vec<Option<f64>> = nu
        .samples()
        .par_iter()
        .map(|s| Some(busemann(&s.point, &o, &plus).ok()? + busemann(&s.point, &o, &minus).ok()?))
        .collect();
    let unresolved = values.iter().filter(|v| v.is_none()).count();
    abort_on_unresolved(unresolved, values.len(), "convexity bracket")?;
    let vals: Vec<f64> = values.into_iter().flatten().collect();
    Ok(ConvexityReport {
        k,
        min: vals.iter().copied().fold(f64::INFINITY, f64::min),
        mean: vals.iter().sum::<f64>() / vals.len() as f64,
        evaluated: vals.len(),
        unresolved,
    })
}

fn abort_on_unresolved(unresolved: usize, total: usize, what: &str) -> Result<()> {
    if unresolved as f64 > MAX_INVALID_FRACTION * total as f64 {
        return Err(Error::InsufficientResolution(format!(
            "{unresolved} of {total} samples too shallow for the {what}"
        )));
    }
    Ok(())
}

/// Maxima of `(ξ|γ_{±k})` over samples in a region avoiding `γ^±`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GromovBoundReport {
    /// `(k, max over samples in the region of max((ξ|γ_k), (ξ|γ_{−k})))`.
    pub per_k: Vec<(u32, f64)>,
    pub max: f64,
    pub trend: Option<LinearFit>,
    /// Two-sided p-value of "no trend in k".
    pub p_value: f64,
    pub evaluated: usize,
    pub unresolved: usize,
}

/// Checks that `(ξ|γ₀^{±k} o)` stays bounded in `k` for `ξ` in `region`.
/// The region must not contain `γ⁺` or `γ⁻`.
pub fn gromov_bound_check(
    fam: &MuKFamily,
    model: &SpaceModel,
    region: &BoundaryRegion,
    k_grid: &[u32],
    nu: &EmpiricalBoundaryMeasure,
) -> Result<GromovBoundReport> {
    for (name, p) in [("γ⁺", fam.attracting()), ("γ⁻", fam.repelling())] {
        if region.contains(p)? {
            return Err(Error::Precondition(format!("region contains the fixed point {name} = {p}")));
        }
    }
    let inside: Vec<Option<&BoundaryPoint>> = nu
        .samples()
        .iter()
        .filter_map(|s| match region.contains(&s.point) {
            Ok(true) => Some(Some(&s.point)),
            Ok(false) => None,
            Err(_) => Some(None),
        })
        .collect();
    let mut unresolved = inside.iter().filter(|p| p.is_none()).count();
    let points: Vec<&BoundaryPoint> = inside.into_iter().flatten().collect();
    let o = model.basepoint();
    let mut per_k = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let targets: Vec<SpacePoint> = [k as i64, -(k as i64)]
            .iter()
            .map(|&e| model.orbit_point(&fam.gamma0().pow(e)))
            .collect::<Result<_>>()?;
        let vals: Vec<Option<f64>> = points
            .par_iter()
            .map(|xi| {
                let a = gromov_product(*xi, &targets[0], &o).ok()?;
                let b = gromov_product(*xi, &targets[1], &o).ok()?;
                Some(a.max(b))
            })
            .collect();
        unresolved = unresolved.max(vals.iter().filter(|v| v.is_none()).count());
        per_k.push((k, vals.into_iter().flatten().fold(f64::NEG_INFINITY, f64::max)));
    }
    abort_on_unresolved(unresolved, nu.len(), "Gromov products")?;
    let xs: Vec<f64> = per_k.iter().map(|(k, _)| *k as f64).collect();
    let ys: Vec<f64> = per_k.iter().map(|(_, v)| *v).collect();
    let trend = linear_fit(&xs, &ys);
    Ok(GromovBoundReport {
        max: ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        p_value: trend.as_ref().map_or(1.0, slope_p_value),
        trend,
        per_k,
        evaluated: points.len(),
        unresolved,
    })
}

/// Outcome of `dim ≤ h/(l log a) + 3σ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimBoundReport {
    pub dim: f64,
    /// `h / (l log a)`.
    pub bound: f64,
    /// Joint standard error of `dim` and the bound.
    pub combined_se: f64,
    /// `bound + 3σ − dim`; negative on violation.
    pub margin: f64,
    pub passed: bool,
    /// `|dim − bound| / bound`, the equality defect on trees.
    pub relative_gap: f64,
}

pub fn dim_bound_check(h: &EstimateCI, l: &EstimateCI, dim: &EstimateCI, a: f64) -> DimBoundReport {
    let bound = h.value / (l.value * a.ln());
    let rel = |e: &EstimateCI| if e.value != 0.0 { e.std_error / e.value.abs() } else { 0.0 };
    let bound_se = bound.abs() * rel(h).hypot(rel(l));
    let combined_se = dim.std_error.hypot(bound_se);
    let margin = bound + 3.0 * combined_se - dim.value;
    DimBoundReport {
        dim: dim.value,
        bound,
        combined_se,
        margin,
        passed: margin >= 0.0,
        relative_gap: if bound != 0.0 { (dim.value - bound).abs() / bound } else { f64::INFINITY },
    }
}

/// Outcome of `h ≤ l v + 3σ` with `v` the volume growth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthBoundReport {
    pub h: f64,
    pub lv: f64,
    pub margin: f64,
    pub passed: bool,
    pub relative_gap: f64,
}

pub fn growth_bound_check(h: &EstimateCI, l: &EstimateCI, v: f64) -> GrowthBoundReport {
    let lv = l.value * v;
    let se = h.std_error.hypot(l.std_error * v);
    let margin = lv + 3.0 * se - h.value;
    GrowthBoundReport { h: h.value, lv, margin, passed: margin >= 0.0, relative_gap: (h.value - lv).abs() / lv }
}

/// Volume growth `log(2k − 1)` of `F_k` in its free generators.
pub fn free_group_growth(rank: u16) -> f64 {
    (2.0 * rank as f64 - 1.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::FiniteMeasure;
    use crate::space::TreeEnd;
    use crate::walker::BoundarySample;

    fn f2() -> SpaceModel {
        SpaceModel::free_group(2).unwrap()
    }

    fn end(s: &str) -> BoundarySample {
        BoundarySample {
            point: BoundaryPoint::Tree(TreeEnd::prefix(Word::parse(s).unwrap()).unwrap()),
            truncation: 0,
            resolution: 0.0,
        }
    }

    fn family(model: &SpaceModel) -> MuKFamily {
        MuKFamily::new(FiniteMeasure::simple_random_walk(model), model.element_from_word("a").unwrap(), model).unwrap()
    }

    #[test]
    fn convexity_bracket_examples() {
        let model = f2();
        let fam = family(&model);
        let nu = EmpiricalBoundaryMeasure::new(vec![end("bbbb")], std::f64::consts::E).unwrap();
        assert_eq!(convexity_check(&fam, &model, &nu, 1).unwrap().min, 2.0);
        let nu = EmpiricalBoundaryMeasure::new(vec![end("abbb")], std::f64::consts::E).unwrap();
        assert_eq!(convexity_check(&fam, &model, &nu, 1).unwrap().min, 0.0);
    }

    #[test]
    fn gromov_bound_outside_a_cylinders() {
        let model = f2();
        let fam = family(&model);
        let samples = ["bab", "BBa", "bbA", "BAB"].map(end).to_vec();
        let nu = EmpiricalBoundaryMeasure::new(samples, std::f64::consts::E).unwrap();
        let outside = BoundaryRegion::cylinders(&["a", "A"]).unwrap().complement();
        let r = gromov_bound_check(&fam, &model, &outside, &[1, 2, 4, 8], &nu).unwrap();
        assert_eq!(r.max, 0.0);
        assert_eq!(r.evaluated, 4);
        assert_eq!(r.p_value, 1.0);
        let bad = BoundaryRegion::cylinders(&["a"]).unwrap();
        assert!(matches!(gromov_bound_check(&fam, &model, &bad, &[1], &nu), Err(Error::Precondition(_))));
    }

    #[test]
    fn whole_boundary_has_mass_one() {
        let nu = EmpiricalBoundaryMeasure::new(["a", "b", "B"].map(end).to_vec(), 2.0).unwrap();
        let m = open_set_mass(&nu, &BoundaryRegion::Whole, 0.99).unwrap();
        assert_eq!(m.mass, 1.0);
        let b = open_set_mass(&nu, &BoundaryRegion::cylinders(&["b"]).unwrap(), 0.99).unwrap();
        assert_eq!(b.hits, 1);
    }

    #[test]
    fn interval_membership() {
        let r = BoundaryRegion::Intervals(vec![(-1.0, 1.0), (5.0, f64::INFINITY)]);
        assert!(r.contains(&BoundaryPoint::Real(0.5)).unwrap());
        assert!(!r.contains(&BoundaryPoint::Real(2.0)).unwrap());
        assert!(r.contains(&BoundaryPoint::Infinity).unwrap());
        assert!(r.clone().complement().contains(&BoundaryPoint::Real(2.0)).unwrap());
    }

    #[test]
    fn dim_bound_equality_case() {
        let h = EstimateCI::exact(0.5 * 3f64.ln(), "exact");
        let l = EstimateCI::exact(0.5, "exact");
        let dim = EstimateCI { std_error: 0.01, ..EstimateCI::exact(3f64.ln(), "pointwise") };
        let r = dim_bound_check(&h, &l, &dim, std::f64::consts::E);
        assert!(r.passed && r.relative_gap < 1e-12);
        let g = growth_bound_check(&h, &l, free_group_growth(2));
        assert!(g.passed && g.relative_gap < 1e-12);
    }
}
