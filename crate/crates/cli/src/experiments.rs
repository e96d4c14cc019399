//! The experiment pipelines behind E1..E5.
//!
//! Each config runs in isolation: an estimator error is recorded in its
//! run and turns the assertions it feeds into failures, while the other
//! assertions of the run and the other configs still execute.

use hypwalk::boundary_lab::{atom_concentration, build_cover, cover_radius, BallKind};
use hypwalk::estimators::{
    correlation_dimension, dim_bound_check, entropy_rate_exact_tree, entropy_upper_bound_with, escape_rate_busemann,
    escape_rate_mc, free_group_growth, gromov_bound_check, growth_bound_check, open_set_mass, pointwise_dimension,
    ratio_experiment, BoundaryRegion, DimensionConfig, EmpiricalBoundaryMeasure, EntropyBudget, NearestNeighbourTree,
    RadialTable, RatioConfig, RateSequence,
};
use hypwalk::rng::derive_seed;
use hypwalk::space::Word;
use hypwalk::stats::EstimateCI;
use hypwalk::walker::{default_truncation, sample_boundary, BoundaryConfig, WalkConfig};
use hypwalk::{BoundaryPoint, FiniteMeasure, SpaceModel};
use serde_json::Value;

use crate::catalog::ExperimentId;
use crate::config::Config;
use crate::report::{num, plot_table, sha256_hex, Assertion, EstimateRecord, Failure, PlotPoint, Run, Table};

/// SHA-256 of the resolved config as JSON.
pub fn config_hash(cfg: &Config) -> String {
    sha256_hex(serde_json::to_string(cfg).expect("config serializes").as_bytes())
}

struct Ctx<'a> {
    cfg: &'a Config,
    hash: String,
    run: Run,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a Config) -> Ctx<'a> {
        let entry = cfg.experiment.entry();
        let hash = config_hash(cfg);
        let run = Run {
            name: cfg.name.clone(),
            experiment: cfg.experiment.to_string(),
            title: entry.title.into(),
            anchor: entry.anchor.into(),
            config_sha256: hash.clone(),
            seed: cfg.seed,
            config: serde_json::to_value(cfg).expect("config serializes"),
            estimates: Vec::new(),
            assertions: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
            tables: Vec::new(),
            plotdata: Vec::new(),
            passed: false,
        };
        Ctx { cfg, hash, run }
    }

    fn seed(&self, tag: &str) -> u64 {
        derive_seed(self.cfg.seed, tag)
    }

    fn estimate(&mut self, name: &str, e: &EstimateCI) {
        self.run.estimates.push(EstimateRecord::new(name, &self.hash, e));
    }

    fn check(&mut self, a: Assertion) {
        self.run.assertions.push(a);
    }

    fn fail(&mut self, stage: &str, e: &hypwalk::Error) {
        self.run.failures.push(Failure::from_error(stage, e));
    }

    fn note(&mut self, s: String) {
        self.run.notes.push(s);
    }

    /// Keeps an estimator error as a note and returns `None`.
    fn diagnose<T>(&mut self, stage: &str, r: hypwalk::Result<T>) -> Option<T> {
        r.map_err(|e| self.note(format!("{stage}: {e}"))).ok()
    }

    fn guard<T>(&mut self, diagnostic: bool, stage: &str, r: hypwalk::Result<T>) -> Option<T> {
        if diagnostic {
            self.diagnose(stage, r)
        } else {
            self.attempt(stage, r)
        }
    }

    /// Records an estimator error and returns `None`.
    fn attempt<T>(&mut self, stage: &str, r: hypwalk::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(stage, &e);
                None
            }
        }
    }
}

/// Runs the experiment named by `cfg.experiment`.
pub fn run_config(cfg: &Config) -> Run {
    let mut ctx = Ctx::new(cfg);
    let model = cfg.model().map_err(hypwalk::Error::InvalidArgument);
    let outcome = model.and_then(|model| match cfg.experiment {
        ExperimentId::E1 | ExperimentId::E2 => dimension_experiment(&mut ctx, &model),
        ExperimentId::E3 => mu_k_sweep(&mut ctx, &model),
        ExperimentId::E4 => busemann_experiment(&mut ctx, &model),
        ExperimentId::E5 => collapse_experiment(&mut ctx, &model),
    });
    if let Err(e) = outcome {
        ctx.fail("run", &e);
    }
    ctx.run.finish();
    ctx.run
}

/// Runs the shared estimators only: Monte Carlo and Busemann escape rates,
/// the entropy bound and both dimension estimators.
pub fn run_estimates(cfg: &Config) -> Run {
    let mut ctx = Ctx::new(cfg);
    let outcome = cfg.model().map_err(hypwalk::Error::InvalidArgument).and_then(|model| {
        let m = cfg.measure_on(&model).map_err(hypwalk::Error::InvalidArgument)?;
        let l = escape(&mut ctx, &m, &model)?;
        let nu = harmonic_samples(&ctx, &m, &model, l.value, "boundary")?;
        if let Some(b) = ctx.attempt("busemann", escape_rate_busemann(&m, &model, &nu, ctx.seed("busemann"))) {
            ctx.estimate("escape_rate_busemann", &b);
        }
        let h = entropy_bound(&mut ctx, &m, &model);
        ctx.estimate("entropy_bound", &h);
        dimensions(&mut ctx, &nu, "", false);
        Ok(())
    });
    if let Err(e) = outcome {
        ctx.fail("run", &e);
    }
    ctx.run.passed = ctx.run.failures.is_empty();
    ctx.run
}

fn escape(ctx: &mut Ctx, m: &FiniteMeasure, model: &SpaceModel) -> hypwalk::Result<EstimateCI> {
    let w = &ctx.cfg.walk;
    let l = escape_rate_mc(m, model, &WalkConfig::new(w.steps, w.trajectories, ctx.seed("walk")))?;
    ctx.estimate("escape_rate_mc", &l);
    Ok(l)
}

fn harmonic_samples(
    ctx: &Ctx,
    m: &FiniteMeasure,
    model: &SpaceModel,
    pilot_rate: f64,
    tag: &str,
) -> hypwalk::Result<EmpiricalBoundaryMeasure> {
    let b = &ctx.cfg.boundary;
    let steps = if b.steps == 0 { default_truncation(pilot_rate) } else { b.steps };
    let mut bc = BoundaryConfig::new(b.samples, steps, ctx.seed(tag));
    bc.depth_cap = b.depth_cap;
    bc.resolution_floor = b.resolution_floor;
    EmpiricalBoundaryMeasure::new(sample_boundary(m, model, &bc)?, model.visual_base())
}

fn dimension_config(ctx: &Ctx, nu: &EmpiricalBoundaryMeasure, residual: f64, seed: u64) -> DimensionConfig {
    let d = &ctx.cfg.dimension;
    let mut c = DimensionConfig::for_measure(nu, seed);
    c.max_centers = d.max_centers;
    c.min_ball_count = d.min_ball_count;
    c.min_radii = d.min_radii;
    c.max_failed_fraction = d.max_failed_fraction;
    c.max_rms_residual = residual;
    c
}

/// Pointwise and correlation dimension of `nu`; `suffix` labels the
/// records. Failures yield `None` and are recorded, or only noted when the
/// estimate is a diagnostic.
fn dimensions(
    ctx: &mut Ctx,
    nu: &EmpiricalBoundaryMeasure,
    suffix: &str,
    diagnostic: bool,
) -> (Option<EstimateCI>, Option<EstimateCI>) {
    let t = &ctx.cfg.thresholds;
    let seed = ctx.seed(&format!("dimension{suffix}"));
    let pw_cfg = dimension_config(ctx, nu, t.pointwise_max_residual, seed);
    let corr_cfg = dimension_config(ctx, nu, t.correlation_max_residual, seed);
    let pw = ctx.guard(diagnostic, &format!("pointwise_dimension{suffix}"), pointwise_dimension(nu, &pw_cfg)).map(|p| {
        ctx.note(format!(
            "pointwise{suffix}: median {:.4}, quartiles [{:.4}, {:.4}], {} of {} centers without a scaling window",
            p.median, p.q1, p.q3, p.failed_centers, p.centers
        ));
        p.estimate(seed)
    });
    let corr = ctx.guard(diagnostic, &format!("correlation_dimension{suffix}"), correlation_dimension(nu, &corr_cfg)).map(|c| {
        let mut t = Table::new(&format!("correlation_curve{suffix}"), &["m", "radius", "c"]);
        for &(m, v) in &c.curve {
            t.push(vec![Value::from(m), num(nu.visual_base().powi(-(m as i32))), num(v)]);
        }
        ctx.run.tables.push(t);
        ctx.note(format!(
            "correlation{suffix}: window m = {}..={}, r² = {:.5}",
            c.curve[c.window.lo].0,
            c.curve[c.window.hi - 1].0,
            c.fit.r_squared
        ));
        c.estimate
    });
    if let Some(p) = &pw {
        ctx.estimate(&format!("pointwise_dimension{suffix}"), p);
    }
    if let Some(c) = &corr {
        ctx.estimate(&format!("correlation_dimension{suffix}"), c);
    }
    (pw, corr)
}

/// A certified upper bound on `h`: the minimum of `H(μⁿ)/n` and of the
/// increments `H(μ^{n+1}) − H(μⁿ)`, exactly on radial tree walks and by
/// convolution powers otherwise.
fn entropy_bound(ctx: &mut Ctx, m: &FiniteMeasure, model: &SpaceModel) -> EstimateCI {
    let e = &ctx.cfg.entropy;
    if model.is_tree() && RadialTable::radial_parameters(m, model).is_some() {
        if let Some(seq) = ctx.attempt("entropy_exact", entropy_rate_exact_tree(m, model, e.n_table)) {
            return EstimateCI::exact(sequence_bound(&seq), "radial_entropy_bound");
        }
    }
    let b = entropy_upper_bound_with(m, EntropyBudget { max_n: e.max_n, support_cap: e.support_cap });
    ctx.note(format!("entropy bound from convolution powers up to n = {}", b.n_reached));
    EstimateCI::exact(b.value, "convolution_entropy_bound")
}

fn sequence_bound(seq: &RateSequence) -> f64 {
    seq.rates().into_iter().chain(seq.increments()).fold(f64::INFINITY, f64::min).max(0.0)
}

fn rel_gap(x: f64, target: f64) -> f64 {
    (x - target).abs() / target.abs()
}

/// E1 and E2: escape rate, entropy, harmonic samples, both dimension
/// estimators and the bound `dim ≤ h/(l log a)`. On nearest-neighbour tree
/// walks the exact values are checked as well.
fn dimension_experiment(ctx: &mut Ctx, model: &SpaceModel) -> hypwalk::Result<()> {
    let cfg = ctx.cfg;
    let t = cfg.thresholds.clone();
    let a = model.visual_base();
    let m = cfg.measure_on(model).map_err(hypwalk::Error::InvalidArgument)?;
    let exact = if model.is_tree() { NearestNeighbourTree::new(&m, model).ok() } else { None };
    let l = escape(ctx, &m, model)?;
    let h_bound = entropy_bound(ctx, &m, model);
    ctx.estimate("entropy_bound", &h_bound);

    if let Some(nn) = &exact {
        let (le, he, de) = (nn.escape_rate(), nn.entropy(), nn.dimension(a));
        ctx.estimate("escape_rate_exact", &EstimateCI::exact(le, "first_passage"));
        ctx.estimate("entropy_exact", &EstimateCI::exact(he, "first_passage"));
        ctx.estimate("dimension_exact", &EstimateCI::exact(de, "letter_chain"));
        ctx.check(Assertion::at_most(
            "escape_rate_matches_exact",
            "|l̂ − l| ≤ escape_abs_tol",
            (l.value - le).abs(),
            t.escape_abs_tol,
        ));
        ctx.check(Assertion::at_most(
            "entropy_bound_above_exact",
            "h ≤ h_bound + 1e-12",
            he,
            h_bound.value + 1e-12,
        ));
        let v = free_group_growth(model.rank().expect("tree"));
        let g = growth_bound_check(&EstimateCI::exact(he, "first_passage"), &l, v);
        ctx.check(
            Assertion::at_most("growth_bound", "h ≤ l̂ v + 3σ", g.h, g.h + g.margin)
                .with_detail(format!("v = log(2r − 1) = {v:.6}")),
        );
    }

    // exact entropy sequence for radial tree walks
    if model.is_tree() && RadialTable::radial_parameters(&m, model).is_some() {
        if let Ok(seq) = entropy_rate_exact_tree(&m, model, cfg.entropy.n_table) {
            let n = seq.len();
            let mut table = Table::new("entropy_sequence", &["n", "rate", "increment"]);
            let incs = seq.increments();
            for (i, r) in seq.rates().iter().enumerate() {
                let inc = if i == 0 { seq.totals[0] } else { incs[i - 1] };
                table.push(vec![Value::from(i + 1), num(*r), num(inc)]);
            }
            ctx.run.tables.push(table);
            ctx.estimate("entropy_rate_at_n_table", &EstimateCI::exact(seq.last_rate(), &format!("H(μ^{n})/{n}")));
            ctx.estimate("entropy_limit_estimate", &EstimateCI::exact(seq.limit_estimate(), &format!("H(μ^{n}) − H(μ^{})", n - 1)));
            if let Some(nn) = &exact {
                ctx.check(Assertion::at_most(
                    "entropy_rate_matches_exact",
                    "|H(μⁿ)/n − h| / h ≤ entropy_rel_tol at n = n_table",
                    rel_gap(seq.last_rate(), nn.entropy()),
                    t.entropy_rel_tol,
                ));
                ctx.check(Assertion::at_most(
                    "entropy_increment_matches_exact",
                    "|H(μⁿ) − H(μⁿ⁻¹) − h| / h ≤ entropy_rel_tol at n = n_table",
                    rel_gap(seq.limit_estimate(), nn.entropy()),
                    t.entropy_rel_tol,
                ));
            }
        }
    }

    let nu = harmonic_samples(ctx, &m, model, l.value, "boundary")?;
    ctx.note(format!("{} harmonic-measure samples", nu.len()));
    if let Some(nn) = &exact {
        cylinder_oracle(ctx, nn, &nu, model)?;
    }
    let (pw, corr) = dimensions(ctx, &nu, "", false);
    for (name, est) in [("pointwise", &pw), ("correlation", &corr)] {
        let Some(d) = est else {
            ctx.check(Assertion::unavailable(&format!("{name}_dimension_bound"), "dim ≤ h/(l log a) + 3σ", "estimator failed"));
            continue;
        };
        let r = dim_bound_check(&h_bound, &l, d, a);
        let rhs = r.bound + t.bound_sigmas * r.combined_se;
        ctx.check(
            Assertion::at_most(&format!("{name}_dimension_bound"), "dim ≤ h_bound/(l̂ log a) + 3σ", d.value, rhs)
                .with_detail(format!("h_bound/(l̂ log a) = {:.6}, σ = {:.6}", r.bound, r.combined_se)),
        );
        if let Some(nn) = &exact {
            let target = nn.dimension(a);
            ctx.check(Assertion::at_most(
                &format!("{name}_dimension_matches_h_over_l"),
                "|dim − h/(l log a)| / (h/(l log a)) ≤ dimension_rel_tol",
                rel_gap(d.value, target),
                t.dimension_rel_tol,
            ));
        }
    }
    if let (Some(p), Some(c)) = (&pw, &corr) {
        if nu.len() >= t.agreement_min_samples {
            ctx.check(Assertion::at_most(
                "dimension_estimators_agree",
                "|pointwise − correlation| / correlation ≤ estimator_agreement_rel_tol",
                rel_gap(p.value, c.value),
                t.estimator_agreement_rel_tol,
            ));
        } else {
            ctx.note(format!("estimator agreement not checked below {} samples", t.agreement_min_samples));
        }
    } else {
        ctx.check(Assertion::unavailable(
            "dimension_estimators_agree",
            "|pointwise − correlation| / correlation ≤ estimator_agreement_rel_tol",
            "estimator failed",
        ));
    }
    Ok(())
}

/// Depth-2 cylinder masses of `ν̂` against the exact cylinder masses, each
/// in its 99.9 % Wilson interval.
fn cylinder_oracle(
    ctx: &mut Ctx,
    nn: &NearestNeighbourTree,
    nu: &EmpiricalBoundaryMeasure,
    model: &SpaceModel,
) -> hypwalk::Result<()> {
    let words = hypwalk::boundary_lab::words_of_length(model.rank().unwrap(), 2);
    let mut table = Table::new("cylinder_masses", &["prefix", "exact", "empirical", "lo", "hi"]);
    let mut outside = Vec::new();
    for w in &words {
        let exact = nn.cylinder_mass(w)?;
        let est = open_set_mass(nu, &BoundaryRegion::Cylinders(vec![w.clone()]), 0.999)?;
        if !(est.lo <= exact && exact <= est.hi) {
            outside.push(w.to_string());
        }
        table.push(vec![Value::from(w.to_string()), num(exact), num(est.mass), num(est.lo), num(est.hi)]);
    }
    ctx.run.tables.push(table);
    ctx.check(Assertion::holds(
        "cylinder_masses_match_exact",
        "exact mass of every depth-2 cylinder inside its 99.9 % interval",
        outside.is_empty(),
        if outside.is_empty() { String::new() } else { format!("outside: {}", outside.join(", ")) },
    ));
    Ok(())
}

/// E4: the Busemann integral against the Monte Carlo escape rate.
fn busemann_experiment(ctx: &mut Ctx, model: &SpaceModel) -> hypwalk::Result<()> {
    let cfg = ctx.cfg;
    let m = cfg.measure_on(model).map_err(hypwalk::Error::InvalidArgument)?;
    let l = escape(ctx, &m, model)?;
    let nu = harmonic_samples(ctx, &m, model, l.value, "boundary")?;
    let seed = ctx.seed("busemann");
    let Some(b) = ctx.attempt("busemann", escape_rate_busemann(&m, model, &nu, seed)) else {
        ctx.check(Assertion::unavailable("busemann_matches_monte_carlo", "|l_β − l̂| ≤ 2 joint σ", "estimator failed"));
        return Ok(());
    };
    ctx.estimate("escape_rate_busemann", &b);
    let joint = l.std_error.hypot(b.std_error);
    ctx.check(
        Assertion::at_most(
            "busemann_matches_monte_carlo",
            "|l_β − l̂| ≤ busemann_joint_se · sqrt(σ_β² + σ̂²)",
            (b.value - l.value).abs(),
            cfg.thresholds.busemann_joint_se * joint,
        )
        .with_detail(format!("l_β = {:.6} ± {:.6}, l̂ = {:.6} ± {:.6}", b.value, b.std_error, l.value, l.std_error)),
    );
    if model.is_tree() {
        if let Ok(nn) = NearestNeighbourTree::new(&m, model) {
            ctx.estimate("escape_rate_exact", &EstimateCI::exact(nn.escape_rate(), "first_passage"));
        }
    }
    Ok(())
}

/// E3: the μ_k sweep.
fn mu_k_sweep(ctx: &mut Ctx, model: &SpaceModel) -> hypwalk::Result<()> {
    let cfg = ctx.cfg;
    let t = cfg.thresholds.clone();
    let s = &cfg.sweep;
    let fam = cfg.family(model).map_err(hypwalk::Error::InvalidArgument)?;
    let grid = &cfg.mu_k.as_ref().expect("validated").k_grid;
    let mut rc = RatioConfig::new(ctx.seed("ratio"));
    rc.steps = s.steps;
    rc.trajectories = s.trajectories;
    rc.boundary_samples = s.boundary_samples;
    rc.boundary_steps = s.boundary_steps;
    rc.entropy = EntropyBudget { max_n: s.entropy_max_n, support_cap: s.support_cap };
    rc.epsilon = t.ratio_target;
    let probe = probe_region(model);
    rc.mass_region = probe.clone();
    let table = ratio_experiment(&fam, model, grid, &rc)?;

    // independent evaluation of the ceiling
    let ceiling = 1.5 * 2f64.ln() + 0.5 * fam.base().entropy();
    let mut tab = Table::new(
        "mu_k",
        &["k", "entropy", "h_bound", "h_bound_n", "escape", "escape_se", "ratio", "busemann_lower", "convexity_min", "region_mass", "region_lo", "region_hi"],
    );
    let mut points = Vec::new();
    for r in &table.rows {
        let (mass, lo, hi) = r.region_mass.as_ref().map_or((f64::NAN, f64::NAN, f64::NAN), |m| (m.mass, m.lo, m.hi));
        tab.push(vec![
            Value::from(r.k),
            num(r.entropy),
            num(r.h_bound),
            Value::from(r.h_bound_n),
            num(r.escape.value),
            num(r.escape.std_error),
            num(r.ratio),
            num(r.busemann_lower),
            num(r.convexity_min),
            num(mass),
            num(lo),
            num(hi),
        ]);
        let k = r.k as f64;
        let (l, se) = (r.escape.value, r.escape.std_error);
        points.push(PlotPoint { k, quantity: "escape_rate".into(), value: l, lo: l - 2.0 * se, hi: l + 2.0 * se });
        points.push(PlotPoint { k, quantity: "entropy".into(), value: r.entropy, lo: r.entropy, hi: r.entropy });
        points.push(PlotPoint { k, quantity: "h_bound".into(), value: r.h_bound, lo: r.h_bound, hi: r.h_bound });
        let rlo = r.h_bound / (l + 2.0 * se);
        let rhi = r.h_bound / (l - 2.0 * se).max(f64::MIN_POSITIVE);
        points.push(PlotPoint { k, quantity: "ratio".into(), value: r.ratio, lo: rlo, hi: rhi });
        ctx.estimate(&format!("escape_rate_mc/k={}", r.k), &r.escape);
        ctx.estimate(&format!("entropy_bound/k={}", r.k), &EstimateCI::exact(r.h_bound, "convolution_entropy_bound"));
    }
    ctx.run.tables.push(tab);
    ctx.run.plotdata.push(plot_table("mu_k", &points));

    // (a)
    let worst = table.rows.iter().map(|r| r.entropy).fold(f64::NEG_INFINITY, f64::max);
    ctx.check(
        Assertion::at_most("entropy_ceiling", "max_k H(μ_k) ≤ (3/2) log 2 + H(μ)/2 + 1e-12", worst, ceiling + 1e-12)
            .with_detail(format!("ceiling = {ceiling:.12}")),
    );
    // (b)
    let ls: Vec<f64> = table.rows.iter().map(|r| r.escape.value).collect();
    let increasing = ls.windows(2).all(|w| w[1] > w[0]);
    ctx.check(Assertion::holds(
        "escape_rate_strictly_increasing",
        "l̂(μ_k) strictly increasing in k",
        increasing,
        format!("{ls:.4?}"),
    ));
    match &table.escape_fit {
        Some(fit) => {
            ctx.check(
                Assertion::at_most("escape_rate_affine", "r² of the affine fit of l̂ against k ≥ escape_fit_min_r2", t.escape_fit_min_r2, fit.r_squared)
                    .with_detail(format!("slope {:.5}, intercept {:.5}", fit.slope, fit.intercept)),
            );
        }
        None => ctx.check(Assertion::unavailable("escape_rate_affine", "r² ≥ escape_fit_min_r2", "fewer than three grid points")),
    }
    // (c)
    let last = table.rows.last().expect("nonempty grid");
    ctx.check(Assertion::below(
        "ratio_below_target",
        "h_bound/l̂ at the largest k < ratio_target",
        last.ratio,
        t.ratio_target,
    ));
    let tail: Vec<f64> = table.rows.iter().filter(|r| r.k >= 2).map(|r| r.ratio).collect();
    ctx.check(Assertion::holds(
        "ratio_monotone_from_k2",
        "h_bound/l̂ nonincreasing in k for k ≥ 2",
        table.monotone_from_k2,
        format!("{tail:.4?}"),
    ));
    // (d)
    let cmin = table.rows.iter().map(|r| r.convexity_min).fold(f64::INFINITY, f64::min);
    if model.is_tree() {
        ctx.check(Assertion::at_most(
            "convexity_bracket_nonnegative",
            "0 ≤ min_ξ β_ξ(o, γ^k o) + β_ξ(o, γ^{−k} o)",
            0.0,
            cmin,
        ));
    } else {
        ctx.note(format!("convexity bracket minimum {cmin:.6} (bounded below by a constant off trees)"));
    }
    // (e)
    if probe.is_some() {
        let lo = table
            .rows
            .iter()
            .map(|r| r.region_mass.as_ref().map_or(f64::NAN, |m| m.lo))
            .fold(f64::INFINITY, f64::min);
        ctx.check(Assertion::below("open_set_mass_positive", "0 < min_k lower 99 % bound of ν̂_k(U)", 0.0, lo));
    }

    // (ξ|γ^{±k}) stays bounded away from γ^±
    if let Some(region) = away_from_axis(&fam, model)? {
        let mut bc = BoundaryConfig::new(s.boundary_samples, s.boundary_steps, ctx.seed("gromov"));
        bc.resolution_floor = 0.0;
        let nu = EmpiricalBoundaryMeasure::new(sample_boundary(fam.base(), model, &bc)?, model.visual_base())?;
        if let Some(g) = ctx.attempt("gromov_bound", gromov_bound_check(&fam, model, &region, grid, &nu)) {
            ctx.check(
                Assertion::at_most("gromov_products_bounded", "trend_alpha ≤ p-value of a slope in max (ξ|γ^{±k})", t.trend_alpha, g.p_value)
                    .with_detail(format!("max {:.4} over {} samples", g.max, g.evaluated)),
            );
        }
    }
    Ok(())
}

/// The cylinder of `b` on trees, used as the open set `U`.
fn probe_region(model: &SpaceModel) -> Option<BoundaryRegion> {
    match model.rank() {
        Some(r) if r >= 2 => BoundaryRegion::cylinders(&["b"]).ok(),
        _ => None,
    }
}

/// The complement of the depth-1 cylinders containing `γ^±`.
fn away_from_axis(fam: &hypwalk::MuKFamily, model: &SpaceModel) -> hypwalk::Result<Option<BoundaryRegion>> {
    if !model.is_tree() {
        return Ok(None);
    }
    let mut prefixes: Vec<Word> = Vec::new();
    for p in [fam.attracting(), fam.repelling()] {
        if let BoundaryPoint::Tree(e) = p {
            prefixes.push(e.prefix_word(1)?);
        }
    }
    Ok(Some(BoundaryRegion::Cylinders(prefixes).complement()))
}

/// E5: dimension of `ν̂_k` across the grid, atom concentration, and the
/// multiplicity of boundary covers.
fn collapse_experiment(ctx: &mut Ctx, model: &SpaceModel) -> hypwalk::Result<()> {
    let cfg = ctx.cfg;
    let t = cfg.thresholds.clone();
    let fam = cfg.family(model).map_err(hypwalk::Error::InvalidArgument)?;
    let grid = cfg.mu_k.as_ref().expect("validated").k_grid.clone();
    let a = model.visual_base();
    let mut points = Vec::new();
    let kmax = *grid.last().expect("nonempty grid");
    let mut last = (None, None);
    for &k in &grid {
        let mu = fam.make_mu_k(k)?;
        let tag = format!("k={k}");
        let nu = harmonic_samples(ctx, &mu, model, 0.0, &format!("boundary/{tag}"))?;
        let (pw, corr) = dimensions(ctx, &nu, &format!("_k{k}"), k != kmax);
        for (q, e) in [("pointwise", &pw), ("correlation", &corr)] {
            if let Some(e) = e {
                points.push(PlotPoint {
                    k: k as f64,
                    quantity: format!("{q}_dimension"),
                    value: e.value,
                    lo: e.value - 2.0 * e.std_error,
                    hi: e.value + 2.0 * e.std_error,
                });
            }
        }
        last = (pw, corr);
    }
    ctx.run.plotdata.push(plot_table("dimension_by_k", &points));

    let boundary_dim = model.rank().map(|r| free_group_growth(r) / a.ln());
    for (name, est) in [("pointwise", &last.0), ("correlation", &last.1)] {
        let below = format!("{name} dimension of ν̂_k at k = {kmax} < collapse_max_dimension");
        let factor = format!("collapse_factor · {name} dimension at k = {kmax} ≤ dim ∂X");
        match est {
            Some(d) => {
                ctx.check(Assertion::below(&format!("{name}_dimension_collapses"), &below, d.value, t.collapse_max_dimension));
                if let Some(bd) = boundary_dim {
                    ctx.check(
                        Assertion::at_most(&format!("{name}_dimension_drop"), &factor, t.collapse_factor * d.value, bd)
                            .with_detail(format!("dim ∂X = log(2r − 1)/log a = {bd:.6}")),
                    );
                }
            }
            None => {
                ctx.check(Assertion::unavailable(&format!("{name}_dimension_collapses"), &below, "estimator failed"));
                if boundary_dim.is_some() {
                    ctx.check(Assertion::unavailable(&format!("{name}_dimension_drop"), &factor, "estimator failed"));
                }
            }
        }
    }

    if model.is_tree() {
        let s = &cfg.sweep;
        let mut bc = BoundaryConfig::new(s.boundary_samples, s.boundary_steps, ctx.seed("atoms"));
        bc.resolution_floor = 0.0;
        if let Some(c) = ctx.attempt("atom_concentration", atom_concentration(&fam, model, &grid, s.atom_depth, &bc)) {
            let mut tab = Table::new("atom_concentration", &["k", "radius", "mass", "lo", "hi"]);
            for r in &c.rows {
                tab.push(vec![Value::from(r.k), num(r.radius), num(r.mass.mass), num(r.mass.lo), num(r.mass.hi)]);
            }
            ctx.run.tables.push(tab);
            ctx.note(format!(
                "mass near the orbit of γ^± (depth {}): Mann–Kendall S = {}, one-sided p = {:.4}",
                c.depth, c.trend.s, c.trend.p_increasing
            ));
        }
        let (assertions, table) = cover_checks(model, s.cover_max_depth)?;
        ctx.run.tables.push(table);
        ctx.run.assertions.extend(assertions);
    } else {
        ctx.note("boundary covers are built on tree backends only".into());
    }
    Ok(())
}

/// Multiplicity of the covers `{B(ξ_w, r) : |w| = n}` for `n = 2..=max_depth`
/// at the radius `a^{−(n−1)}` (open and closed balls) and at the
/// sub-cylinder radius `0.999 a^{−(n−1)}`.
pub fn cover_checks(model: &SpaceModel, max_depth: usize) -> hypwalk::Result<(Vec<Assertion>, Table)> {
    let mut table = Table::new("covers", &["n", "radius", "kind", "multiplicity", "covers", "max_center_distance"]);
    let mut sub_ok = true;
    let mut all_cover = true;
    let mut mults = Vec::new();
    for n in 2..=max_depth {
        let r = cover_radius(model, n);
        for (label, radius, kind) in
            [("open", r, BallKind::Open), ("closed", r, BallKind::Closed), ("sub_cylinder", 0.999 * r, BallKind::Closed)]
        {
            let c = build_cover(model, n, radius, kind)?;
            all_cover &= c.covers;
            match label {
                "sub_cylinder" => sub_ok &= c.multiplicity == 1,
                _ => mults.push((n, label, c.multiplicity)),
            }
            table.push(vec![
                Value::from(n),
                num(radius),
                Value::from(label),
                Value::from(c.multiplicity),
                Value::from(c.covers),
                Value::from(c.max_center_distance),
            ]);
        }
    }
    let first = |label: &str| mults.iter().find(|m| m.1 == label).map_or(0, |m| m.2);
    let max = |label: &str| mults.iter().filter(|m| m.1 == label).map(|m| m.2).max().unwrap_or(0);
    let mut out = vec![
        Assertion::holds("covers_are_covers", "every cover contains every test point", all_cover, String::new()),
        Assertion::holds(
            "sub_cylinder_multiplicity_one",
            "multiplicity = 1 at radius 0.999 a^{−(n−1)} for every n",
            sub_ok,
            String::new(),
        ),
    ];
    for label in ["open", "closed"] {
        out.push(
            Assertion::at_most(
                &format!("{label}_cover_multiplicity_bounded"),
                &format!("max_n multiplicity ≤ multiplicity at n = 2 ({label} balls of radius a^{{−(n−1)}})"),
                max(label) as f64,
                first(label) as f64,
            )
            .with_detail(format!("n = 2..={max_depth}")),
        );
    }
    Ok((out, table))
}
