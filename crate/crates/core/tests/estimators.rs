//! Cross-estimator consistency on the three reference walks.

use std::f64::consts::E;

use hypwalk::estimators::*;
use hypwalk::space::Mat2;
use hypwalk::walker::{sample_boundary, BoundaryConfig, WalkConfig};
use hypwalk::{Error, FiniteMeasure, MuKFamily, SpaceModel};

fn f2() -> SpaceModel {
    SpaceModel::free_group(2).unwrap()
}

fn plane() -> SpaceModel {
    SpaceModel::fuchsian(vec![Mat2::boost(1.0), Mat2::dilation(1.0)]).unwrap()
}

fn biased(t: &SpaceModel) -> FiniteMeasure {
    let w = |s: &str| t.element_from_word(s).unwrap();
    FiniteMeasure::new(vec![(w("a"), 0.35), (w("A"), 0.15), (w("b"), 0.25), (w("B"), 0.25)]).unwrap()
}

fn boundary(m: &FiniteMeasure, model: &SpaceModel, samples: usize, seed: u64) -> EmpiricalBoundaryMeasure {
    let mut cfg = BoundaryConfig::new(samples, 300, seed);
    cfg.resolution_floor = 0.0;
    EmpiricalBoundaryMeasure::new(sample_boundary(m, model, &cfg).unwrap(), model.visual_base()).unwrap()
}

fn dimensions(nu: &EmpiricalBoundaryMeasure, residual: f64) -> (f64, f64) {
    let mut cfg = DimensionConfig::for_measure(nu, 17);
    cfg.max_rms_residual = residual;
    let pw = pointwise_dimension(nu, &cfg).unwrap();
    let corr = correlation_dimension(nu, &cfg).unwrap();
    (pw.median, corr.estimate.value)
}

#[test]
fn exact_rate_sequences_are_monotone() {
    let t = f2();
    let srw = FiniteMeasure::simple_random_walk(&t);
    let fam = MuKFamily::new(srw.clone(), t.element_from_word("a").unwrap(), &t).unwrap();
    let cases = [(srw.clone(), 200), (biased(&t), 8), (fam.make_mu_k(2).unwrap(), 6)];
    for (m, n) in &cases {
        let l = escape_rate_exact_tree(m, &t, *n).unwrap();
        let h = entropy_rate_exact_tree(m, &t, *n).unwrap();
        assert_eq!(l.monotonicity_violation(1e-9), None, "L(μⁿ)/n");
        assert_eq!(h.monotonicity_violation(1e-9), None, "H(μⁿ)/n");
        // L(μⁿ)/n ≥ l and H(μⁿ)/n ≥ h
        assert!(l.last_rate() >= 0.0 && h.last_rate() >= 0.0);
    }
    let nn = NearestNeighbourTree::new(&biased(&t), &t).unwrap();
    let l = escape_rate_exact_tree(&biased(&t), &t, 8).unwrap();
    let h = entropy_rate_exact_tree(&biased(&t), &t, 8).unwrap();
    assert!(l.last_rate() >= nn.escape_rate() - 1e-12);
    assert!(h.last_rate() >= nn.entropy() - 1e-12);
    assert!(h.limit_estimate() >= nn.entropy() - 1e-12, "increments bound h from above");
}

#[test]
fn monte_carlo_matches_exact_tree_rates() {
    let t = f2();
    let srw = FiniteMeasure::simple_random_walk(&t);
    let fam = MuKFamily::new(srw.clone(), t.element_from_word("a").unwrap(), &t).unwrap();
    // E|x_n| = L(μⁿ) at every n, so compare at the same n.
    let cases = [(srw, 1000, 1000), (biased(&t), 8, 20_000), (fam.make_mu_k(4).unwrap(), 6, 20_000)];
    for (i, (m, n, trajectories)) in cases.iter().enumerate() {
        let exact = escape_rate_exact_tree(m, &t, *n).unwrap().last_rate();
        let mc = escape_rate_mc(m, &t, &WalkConfig::new(*n, *trajectories, 40 + i as u64)).unwrap();
        let z = (mc.value - exact).abs() / mc.std_error;
        assert!(z < 3.0, "case {i}: mc {} ± {} vs exact {exact}", mc.value, mc.std_error);
    }
}

#[test]
fn busemann_formula_matches_monte_carlo() {
    let t = f2();
    let hp = plane();
    let cases = [
        (t.clone(), FiniteMeasure::simple_random_walk(&t), 1000),
        (t.clone(), biased(&t), 1000),
        (hp.clone(), FiniteMeasure::simple_random_walk(&hp), 600),
    ];
    for (i, (model, m, n)) in cases.iter().enumerate() {
        let seed = 100 + i as u64;
        let mc = escape_rate_mc(m, model, &WalkConfig::new(*n, 1000, seed)).unwrap();
        let nu = boundary(m, model, 10_000, seed);
        let b = escape_rate_busemann(m, model, &nu, seed).unwrap();
        let z = mc.z_distance(&b);
        assert!(z <= 2.0, "case {i}: mc {} ± {}, busemann {} ± {}", mc.value, mc.std_error, b.value, b.std_error);
    }
    let nn = NearestNeighbourTree::new(&biased(&t), &t).unwrap();
    let nu = boundary(&biased(&t), &t, 10_000, 7);
    let b = escape_rate_busemann(&biased(&t), &t, &nu, 7).unwrap();
    assert!((b.value - nn.escape_rate()).abs() < 3.0 * b.std_error);
}

#[test]
fn srw_dimensions_match_h_over_l() {
    let t = f2();
    let nu = boundary(&FiniteMeasure::simple_random_walk(&t), &t, 100_000, 1);
    let (pw, corr) = dimensions(&nu, 0.05);
    let target = 3f64.ln();
    assert!((pw - target).abs() < 0.1 * target, "pointwise {pw}");
    assert!((corr - target).abs() < 0.1 * target, "correlation {corr}");
    assert!((pw - corr).abs() < 0.15 * corr);
}

#[test]
fn biased_tree_dimensions_match_h_over_l() {
    let t = f2();
    let m = biased(&t);
    let nn = NearestNeighbourTree::new(&m, &t).unwrap();
    let target = nn.entropy() / nn.escape_rate();
    assert!((target - nn.dimension(E)).abs() < 1e-9);
    let nu = boundary(&m, &t, 100_000, 2);
    let (pw, corr) = dimensions(&nu, 0.2);
    assert!((pw - target).abs() < 0.1 * target, "pointwise {pw} vs {target}");
    assert!((corr - target).abs() < 0.1 * target, "correlation {corr} vs {target}");
    assert!((pw - corr).abs() < 0.15 * corr);
}

#[test]
fn strict_residual_fails_on_multifractal_measures() {
    let t = f2();
    let nu = boundary(&biased(&t), &t, 100_000, 2);
    let cfg = DimensionConfig::for_measure(&nu, 17);
    assert!(matches!(pointwise_dimension(&nu, &cfg), Err(Error::EstimatorFailure(_))));
}

#[test]
fn plane_dimensions_agree_and_respect_the_bound() {
    let hp = plane();
    let m = FiniteMeasure::simple_random_walk(&hp);
    let nu = boundary(&m, &hp, 100_000, 3);
    let (pw, corr) = dimensions(&nu, 0.2);
    assert!((pw - corr).abs() < 0.15 * corr, "pointwise {pw} vs correlation {corr}");
    let h = entropy_upper_bound_with(&m, EntropyBudget::default());
    let l = escape_rate_mc(&m, &hp, &WalkConfig::new(600, 1000, 3)).unwrap();
    let report = dim_bound_check(&hypwalk::stats::EstimateCI::exact(h.value, "entropy_bound"), &l, &hypwalk::stats::EstimateCI::exact(corr, "correlation"), hp.visual_base());
    assert!(report.passed, "{report:?}");
}
