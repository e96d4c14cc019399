//! Acceptance criteria 1–8. Each test prints one `[n] PASS|FAIL` line with
//! its sub-checks and then asserts. Tolerances are pinned here, independent
//! of the config thresholds.

use std::collections::HashMap;
use std::sync::{LazyLock, OnceLock};
use std::time::{Duration, Instant};

use hypwalk::boundary_lab::{uniform_cylinder_mass, Cylinder};
use hypwalk::estimators::NearestNeighbourTree;
use hypwalk::rng::stream_rng;
use hypwalk::space::{busemann, gromov_product, Letter, TreeEnd, Word};
use hypwalk::{BoundaryPoint, FiniteMeasure, SpaceModel, SpacePoint};
use hypwalk_cli::catalog::bundled_configs;
use hypwalk_cli::experiments::cover_checks;
use hypwalk_cli::report::{strip_timestamp, Assertion, Report, Run};
use hypwalk_cli::{run_config, Config};
use rand::Rng;
use serde_json::Value;

const INSTANCES: usize = 10_000;
const ESCAPE_TOL: f64 = 0.015;
const ENTROPY_REL: f64 = 0.02;
const DIMENSION_REL: f64 = 0.10;

fn bundled(name: &str) -> Config {
    let b = bundled_configs().find(|b| b.name == name).unwrap_or_else(|| panic!("no bundled config {name}"));
    Config::parse(b.name, b.name, b.text).unwrap()
}

/// Every bundled config runs once; the criteria share the runs.
static RUNS: LazyLock<HashMap<&'static str, OnceLock<(Run, Duration)>>> =
    LazyLock::new(|| bundled_configs().map(|b| (b.name, OnceLock::new())).collect());

fn run(name: &str) -> &'static (Run, Duration) {
    RUNS[name].get_or_init(|| {
        let start = Instant::now();
        let r = run_config(&bundled(name));
        (r, start.elapsed())
    })
}

fn assertion<'a>(r: &'a Run, name: &str) -> &'a Assertion {
    r.assertions.iter().find(|a| a.name == name).unwrap_or_else(|| panic!("{}: no assertion {name}", r.name))
}

fn estimate(r: &Run, name: &str) -> f64 {
    r.estimates.iter().find(|e| e.estimator == name).unwrap_or_else(|| panic!("{}: no estimate {name}", r.name)).value
}

fn described(r: &Run, name: &str) -> (String, bool) {
    let a = assertion(r, name);
    (format!("{}: {} (lhs {:.6}, rhs {:.6}, margin {:.6})", r.name, a.inequality, a.lhs, a.rhs, a.margin), a.passed)
}

/// Prints the criterion line with its sub-checks and asserts that all hold.
fn verdict(id: u32, title: &str, checks: &[(String, bool)], elapsed: Duration) {
    let ok = checks.iter().all(|c| c.1);
    println!("[{id}] {} {title} ({:.1} s)", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    for (what, passed) in checks {
        println!("    {} {what}", if *passed { "ok  " } else { "FAIL" });
    }
    let failed: Vec<&String> = checks.iter().filter(|c| !c.1).map(|c| &c.0).collect();
    assert!(ok, "criterion {id} failed: {failed:#?}");
}

fn within(what: &str, x: f64, target: f64, rel: f64) -> (String, bool) {
    let gap = (x - target).abs() / target;
    (format!("{what}: {x:.6} vs {target:.6}, relative gap {gap:.4} < {rel}"), gap < rel)
}

fn random_word<R: Rng>(rng: &mut R, len: usize) -> Word {
    const ALL: [Letter; 4] = [1, -1, 2, -2];
    let mut w = Word::identity();
    while w.len() < len {
        let x = ALL[rng.random_range(0..4)];
        if w.last() != Some(-x) {
            w.push(x);
        }
    }
    w
}

fn random_vertex<R: Rng>(rng: &mut R) -> SpacePoint {
    let len = rng.random_range(0..=16);
    SpacePoint::Vertex(random_word(rng, len))
}

/// An end of depth 60 sharing a random-length prefix with `base`, so that
/// long common prefixes are frequent.
fn random_end<R: Rng>(rng: &mut R, base: &Word) -> BoundaryPoint {
    let keep = rng.random_range(0..=base.len());
    let mut w = base.prefix(keep);
    while w.len() < 60 {
        let x = random_word(rng, 1).letters()[0];
        if w.last() != Some(-x) {
            w.push(x);
        }
    }
    BoundaryPoint::Tree(TreeEnd::prefix(w).unwrap())
}

#[test]
fn criterion_1_tree_exactness() {
    let start = Instant::now();
    let t = SpaceModel::free_group(2).unwrap();
    let mut rng = stream_rng(0x7e57, 1);
    let (mut delta, mut cocycle, mut ultra) = (0, 0, 0);
    for _ in 0..INSTANCES {
        let [x, y, z, o] = [(); 4].map(|_| random_vertex(&mut rng));
        let g = |p: &SpacePoint, q: &SpacePoint| gromov_product(p, q, &o).unwrap();
        if g(&x, &z) < g(&x, &y).min(g(&y, &z)) {
            delta += 1;
        }
    }
    for _ in 0..INSTANCES {
        let base = random_word(&mut rng, 60);
        let xi = random_end(&mut rng, &base);
        let [x, y, z] = [(); 3].map(|_| random_vertex(&mut rng));
        let b = |p: &SpacePoint, q: &SpacePoint| busemann(&xi, p, q).unwrap();
        if b(&x, &y) + b(&y, &z) != b(&x, &z) {
            cocycle += 1;
        }
    }
    for _ in 0..INSTANCES {
        let base = random_word(&mut rng, 60);
        let [xi, eta, zeta] = [(); 3].map(|_| random_end(&mut rng, &base));
        let rho = |p: &BoundaryPoint, q: &BoundaryPoint| t.visual_quasimetric(p, q).unwrap();
        if rho(&xi, &zeta) > rho(&xi, &eta).max(rho(&eta, &zeta)) {
            ultra += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "tree exactness",
        &[
            (format!("four-point inequality with δ = 0: {delta} violations in {INSTANCES}"), delta == 0),
            (format!("Busemann cocycle identity: {cocycle} violations in {INSTANCES}"), cocycle == 0),
            (format!("ultrametric inequality for ρ: {ultra} violations in {INSTANCES}"), ultra == 0),
            (format!("runtime {:.2} s < 10 s", elapsed.as_secs_f64()), elapsed < Duration::from_secs(10)),
        ],
        elapsed,
    );
}

#[test]
fn criterion_2_simple_random_walk_closed_forms() {
    let (r, elapsed) = run("e1_tree_srw");
    let t = SpaceModel::free_group(2).unwrap();
    let nn = NearestNeighbourTree::new(&FiniteMeasure::simple_random_walk(&t), &t).unwrap();
    // birth–death chain of |x_n|: up 3/4, down 1/4
    let drift = 0.75 - 0.25;
    let h = 0.5 * 3f64.ln();
    let dim = 3f64.ln();
    let l_hat = estimate(r, "escape_rate_mc");
    let h_n = estimate(r, "entropy_rate_at_n_table");
    let h_inc = estimate(r, "entropy_limit_estimate");
    let n_table = r.config["entropy"]["n_table"].as_u64().unwrap();
    let pw = estimate(r, "pointwise_dimension");
    let corr = estimate(r, "correlation_dimension");
    let ab = Cylinder::new(Word::parse("ab").unwrap());
    let checks = vec![
        ((format!("exact escape rate {:.12} = drift {drift}", nn.escape_rate())), (nn.escape_rate() - drift).abs() < 1e-12),
        (format!("l̂ = {l_hat:.6} within {ESCAPE_TOL} of {drift}"), (l_hat - drift).abs() <= ESCAPE_TOL),
        (format!("exact entropy {:.12} = ½ log 3", nn.entropy()), (nn.entropy() - h).abs() < 1e-12),
        within(&format!("H(μⁿ)/n at n = {n_table}"), h_n, h, ENTROPY_REL),
        within(&format!("H(μⁿ) − H(μⁿ⁻¹) at n = {n_table}"), h_inc, h, ENTROPY_REL),
        (
            format!("cylinder counting: ν[ab] = {:.12} = 1/12", nn.cylinder_mass(&ab.prefix).unwrap()),
            (nn.cylinder_mass(&ab.prefix).unwrap() - uniform_cylinder_mass(2, &ab)).abs() < 1e-12,
        ),
        described(r, "cylinder_masses_match_exact"),
        within("pointwise dimension", pw, dim, DIMENSION_REL),
        within("correlation dimension", corr, dim, DIMENSION_REL),
        within("pointwise dimension against ĥ/l̂ (increment entropy)", pw, h_inc / l_hat, DIMENSION_REL),
        within("correlation dimension against ĥ/l̂ (increment entropy)", corr, h_inc / l_hat, DIMENSION_REL),
        (format!("runtime {:.1} s < 300 s", elapsed.as_secs_f64()), *elapsed < Duration::from_secs(300)),
    ];
    verdict(2, "simple random walk on F2 against closed forms", &checks, *elapsed);
}

#[test]
fn criterion_3_dimension_bound() {
    let start = Instant::now();
    let mut checks = Vec::new();
    for name in ["e1_tree_srw", "e2_tree_biased", "e2_halfplane"] {
        let (r, _) = run(name);
        checks.push(described(r, "pointwise_dimension_bound"));
        checks.push(described(r, "correlation_dimension_bound"));
    }
    verdict(3, "dim ≤ h/(l log a) on every bundled walk", &checks, start.elapsed());
}

#[test]
fn criterion_4_busemann_formula() {
    let start = Instant::now();
    let mut checks = Vec::new();
    for name in ["e4_busemann_tree", "e4_busemann_halfplane"] {
        let (r, elapsed) = run(name);
        checks.push(described(r, "busemann_matches_monte_carlo"));
        checks.push((format!("{name}: runtime {:.1} s < 120 s", elapsed.as_secs_f64()), *elapsed < Duration::from_secs(120)));
    }
    verdict(4, "escape rate as a Busemann integral", &checks, start.elapsed());
}

#[test]
fn criterion_5_mu_k_sweep() {
    let (r, elapsed) = run("e3_mu_k");
    let t = SpaceModel::free_group(2).unwrap();
    let ceiling = 1.5 * 2f64.ln() + 0.5 * FiniteMeasure::simple_random_walk(&t).entropy();
    let table = r.tables.iter().find(|t| t.name == "mu_k").unwrap();
    let col = |c: &str| table.columns.iter().position(|x| x == c).unwrap();
    let rows: Vec<(u64, f64, f64)> = table
        .rows
        .iter()
        .map(|row| {
            let f = |v: &Value| v.as_f64().unwrap();
            (row[col("k")].as_u64().unwrap(), f(&row[col("entropy")]), f(&row[col("ratio")]))
        })
        .collect();
    let ks: Vec<u64> = rows.iter().map(|r| r.0).collect();
    let worst = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let ratio = |k| rows.iter().find(|r| r.0 == k).unwrap().2;
    let checks = vec![
        (format!("grid {ks:?}"), ks == [0, 1, 2, 4, 8, 16, 32]),
        (format!("(a) max H(μ_k) = {worst:.12} ≤ (3/2) log 2 + H(μ)/2 = {ceiling:.12}"), worst <= ceiling + 1e-12),
        described(r, "entropy_ceiling"),
        described(r, "escape_rate_strictly_increasing"),
        described(r, "escape_rate_affine"),
        described(r, "ratio_below_target"),
        described(r, "ratio_monotone_from_k2"),
        (format!("ratio(32) = {:.4} < ratio(4) = {:.4}", ratio(32), ratio(4)), ratio(32) < ratio(4)),
        described(r, "convexity_bracket_nonnegative"),
        described(r, "open_set_mass_positive"),
        (format!("runtime {:.1} s < 900 s", elapsed.as_secs_f64()), *elapsed < Duration::from_secs(900)),
    ];
    verdict(5, "μ_k sweep", &checks, *elapsed);
}

#[test]
fn criterion_6_dimension_collapse() {
    let (r, elapsed) = run("e5_collapse");
    let mut checks = Vec::new();
    for est in ["pointwise", "correlation"] {
        let d = estimate(r, &format!("{est}_dimension_k32"));
        checks.push((format!("{est} dimension of ν̂_32 = {d:.4} < 0.3"), d < 0.3));
        checks.push((format!("3 × {est} dimension = {:.4} ≤ log 3", 3.0 * d), 3.0 * d <= 3f64.ln()));
        checks.push(described(r, &format!("{est}_dimension_collapses")));
        checks.push(described(r, &format!("{est}_dimension_drop")));
    }
    verdict(6, "dimension collapse of ν_k", &checks, *elapsed);
}

#[test]
fn criterion_7_finite_multiplicity_cover() {
    let start = Instant::now();
    let t = SpaceModel::free_group(2).unwrap();
    let (assertions, table) = cover_checks(&t, 12).unwrap();
    let elapsed = start.elapsed();
    let n_values: Vec<u64> = table.rows.iter().map(|r| r[0].as_u64().unwrap()).collect();
    let mut checks: Vec<(String, bool)> = assertions
        .iter()
        .map(|a| (format!("{}: {} (lhs {}, rhs {})", a.name, a.inequality, a.lhs, a.rhs), a.passed))
        .collect();
    checks.push((
        format!("depths {}..={}", n_values.first().unwrap(), n_values.last().unwrap()),
        n_values.first() == Some(&2) && n_values.last() == Some(&12),
    ));
    checks.push((format!("runtime {:.2} s < 30 s", elapsed.as_secs_f64()), elapsed < Duration::from_secs(30)));
    verdict(7, "finite-multiplicity cover", &checks, elapsed);
}

#[test]
fn criterion_8_reproducibility() {
    let start = Instant::now();
    let mut checks = Vec::new();
    for b in bundled_configs() {
        let (first, _) = run(b.name);
        let second = run_config(&bundled(b.name));
        let a = Report::new(vec![first.clone()], 1).to_json();
        let c = Report::new(vec![second], 2).to_json();
        checks.push((
            format!("{}: identical report JSON apart from the timestamp ({} bytes)", b.name, a.len()),
            a != c && strip_timestamp(&a) == strip_timestamp(&c),
        ));
    }
    verdict(8, "reproducibility", &checks, start.elapsed());
}
