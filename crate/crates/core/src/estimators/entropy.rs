//! Asymptotic entropy `h = lim H(μⁿ)/n`: exact sequences on trees and
//! certified upper bounds on any backend.

use serde::Serialize;

use super::radial::RadialTable;
use super::sequence::{RateSequence, Route};
use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, DEFAULT_SUPPORT_CAP};
use crate::space::SpaceModel;

/// `H(μⁿ)/n` for `n = 1..=n_table`: radial recursion for radial
/// nearest-neighbour measures, convolution powers otherwise.
pub fn entropy_rate_exact_tree(m: &FiniteMeasure, model: &SpaceModel, n_table: usize) -> Result<RateSequence> {
    entropy_rate_exact_tree_capped(m, model, n_table, DEFAULT_SUPPORT_CAP)
}

pub fn entropy_rate_exact_tree_capped(
    m: &FiniteMeasure,
    model: &SpaceModel,
    n_table: usize,
    cap: usize,
) -> Result<RateSequence> {
    if !model.is_tree() {
        return Err(Error::Unsupported("exact entropy rates need a tree backend".into()));
    }
    if n_table == 0 {
        return Err(Error::InvalidArgument("n_table must be >= 1".into()));
    }
    if RadialTable::radial_parameters(m, model).is_some() {
        let t = RadialTable::new(m, model, n_table)?;
        return Ok(RateSequence::new(Route::Radial, (1..=n_table).map(|n| t.entropy(n)).collect()));
    }
    let totals = convolution_entropies(m, n_table, cap).map_err(|e| match e {
        Error::ResourceLimit(msg) => {
            Error::ResourceLimit(format!("{msg}; the radial recursion handles radial nearest-neighbour measures"))
        }
        e => e,
    })?;
    Ok(RateSequence::new(Route::Convolution, totals))
}

/// `H(μⁿ)` for `n = 1..=n_max`, failing on the first cap overflow.
fn convolution_entropies(m: &FiniteMeasure, n_max: usize, cap: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_max);
    let mut power = m.clone();
    for n in 1..=n_max {
        out.push(power.entropy());
        if n < n_max {
            power = power.convolve_capped(m, cap)?;
        }
    }
    Ok(out)
}

/// Budget for [`entropy_upper_bound_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyBudget {
    pub max_n: usize,
    pub support_cap: usize,
}

impl Default for EntropyBudget {
    fn default() -> Self {
        EntropyBudget { max_n: 10, support_cap: 200_000 }
    }
}

/// An upper bound on `h` with the data it was taken from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyBound {
    pub value: f64,
    /// Largest `n` for which `H(μⁿ)` was computed.
    pub n_reached: usize,
    /// `H(μⁿ)` for `n = 1..=n_reached`.
    pub totals: Vec<f64>,
}

/// `min(H(μⁿ)/n, H(μ^{n+1}) − H(μⁿ))` over the convolution powers that fit
/// the budget. Both families bound `h` from above; the increments are
/// nonincreasing and approach `h` at rate `O(1/n)` instead of `O(log n / n)`.
pub fn entropy_upper_bound_with(m: &FiniteMeasure, budget: EntropyBudget) -> EntropyBound {
    let mut totals = vec![m.entropy()];
    let mut power = m.clone();
    while totals.len() < budget.max_n {
        match power.convolve_capped(m, budget.support_cap) {
            Ok(p) => {
                totals.push(p.entropy());
                power = p;
            }
            Err(_) => break,
        }
    }
    let seq = RateSequence::new(Route::Convolution, totals);
    let value = seq.rates().into_iter().chain(seq.increments()).fold(f64::INFINITY, f64::min).max(0.0);
    EntropyBound { value, n_reached: seq.len(), totals: seq.totals }
}

/// [`entropy_upper_bound_with`] under the default budget.
pub fn entropy_upper_bound(m: &FiniteMeasure) -> f64 {
    entropy_upper_bound_with(m, EntropyBudget::default()).value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> SpaceModel {
        SpaceModel::free_group(2).unwrap()
    }

    #[test]
    fn dirac_has_zero_entropy() {
        let model = f2();
        let da = FiniteMeasure::dirac(model.element_from_word("a").unwrap());
        assert_eq!(entropy_upper_bound(&da), 0.0);
        let seq = entropy_rate_exact_tree(&da, &model, 5).unwrap();
        assert!(seq.rates().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn first_term_is_entropy() {
        let model = f2();
        let m = FiniteMeasure::new(vec![
            (model.element_from_word("a").unwrap(), 0.35),
            (model.element_from_word("A").unwrap(), 0.15),
            (model.element_from_word("b").unwrap(), 0.25),
            (model.element_from_word("B").unwrap(), 0.25),
        ])
        .unwrap();
        let seq = entropy_rate_exact_tree(&m, &model, 3).unwrap();
        assert_eq!(seq.route, Route::Convolution);
        assert!((seq.rate(1) - m.entropy()).abs() < 1e-15);
    }

    #[test]
    fn radial_entropy_matches_convolution() {
        let model = f2();
        let srw = FiniteMeasure::simple_random_walk(&model);
        let radial = entropy_rate_exact_tree(&srw, &model, 8).unwrap();
        let direct = convolution_entropies(&srw, 8, DEFAULT_SUPPORT_CAP).unwrap();
        for n in 1..=8 {
            assert!((radial.totals[n - 1] - direct[n - 1]).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn srw_refinement_beats_single_step() {
        let model = f2();
        let srw = FiniteMeasure::simple_random_walk(&model);
        let b = entropy_upper_bound_with(&srw, EntropyBudget { max_n: 2, support_cap: 100 });
        assert_eq!(b.n_reached, 2);
        assert!(b.value < 4f64.ln());
    }

    #[test]
    fn cap_overflow_is_a_resource_error() {
        let model = f2();
        let m = FiniteMeasure::new(vec![
            (model.element_from_word("a").unwrap(), 0.5),
            (model.element_from_word("b").unwrap(), 0.5),
        ])
        .unwrap();
        assert!(matches!(entropy_rate_exact_tree_capped(&m, &model, 10, 50), Err(Error::ResourceLimit(_))));
    }
}
