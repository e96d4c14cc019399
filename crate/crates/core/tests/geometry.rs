//! Metric identities of both backends on random inputs.

use hypwalk::space::{busemann, gromov_product, Classification, Letter, Mat2, TreeEnd, Word};
use hypwalk::stats::linear_fit;
use hypwalk::{BoundaryPoint, GroupElement, SpaceModel, SpacePoint};
use num_complex::Complex64;
use proptest::prelude::*;

fn letters(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop::sample::select(vec![1i16, -1, 2, -2]), 0..=max_len)
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    letters(max_len).prop_map(|l| Word::from_letters(l).unwrap())
}

fn vertex(max_len: usize) -> impl Strategy<Value = SpacePoint> {
    word(max_len).prop_map(SpacePoint::Vertex)
}

/// A reduced word of length exactly `len`: each letter avoids the inverse
/// of the previous one.
fn reduced_word(len: usize) -> impl Strategy<Value = Word> {
    (0..4usize, prop::collection::vec(0..3usize, len.saturating_sub(1))).prop_map(move |(first, rest)| {
        const ALL: [Letter; 4] = [1, -1, 2, -2];
        let mut l = vec![ALL[first]];
        for r in rest {
            let prev = *l.last().unwrap();
            let choices: Vec<Letter> = ALL.iter().copied().filter(|&x| x != -prev).collect();
            l.push(choices[r]);
        }
        Word::from_letters(l).unwrap()
    })
}

/// A depth-stamped end of depth 60, sharing a random prefix with a
/// random branch so that long common prefixes occur.
fn tree_end() -> impl Strategy<Value = BoundaryPoint> {
    (reduced_word(60), reduced_word(60), 0..60usize).prop_map(|(u, v, k)| {
        let mut w = u.prefix(k);
        for &x in v.letters() {
            if w.len() == 60 {
                break;
            }
            if Some(-x) != w.last() {
                w.push(x);
            }
        }
        while w.len() < 60 {
            let x = if w.last() == Some(-1) { 2 } else { 1 };
            w.push(x);
        }
        BoundaryPoint::Tree(TreeEnd::prefix(w).unwrap())
    })
}

fn upper() -> impl Strategy<Value = Complex64> {
    (-5.0f64..5.0, -3.0f64..3.0).prop_map(|(x, t)| Complex64::new(x, t.exp()))
}

fn mat() -> impl Strategy<Value = Mat2> {
    (0.2f64..3.0, any::<bool>(), -3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, neg, b, c)| {
        let a = if neg { -a } else { a };
        Mat2::new(a, b, c, (1.0 + b * c) / a).unwrap()
    })
}

fn plane_end() -> impl Strategy<Value = BoundaryPoint> {
    prop_oneof![9 => (-5.0f64..5.0).prop_map(BoundaryPoint::Real), 1 => Just(BoundaryPoint::Infinity)]
}

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 10_000, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn tree_products_are_zero_hyperbolic(x in vertex(16), y in vertex(16), z in vertex(16), o in vertex(16)) {
        let g = |p: &SpacePoint, q: &SpacePoint| gromov_product(p, q, &o).unwrap();
        prop_assert!(g(&x, &z) >= g(&x, &y).min(g(&y, &z)));
    }

    #[test]
    fn tree_visual_quasimetric_is_ultrametric(xi in tree_end(), eta in tree_end(), zeta in tree_end()) {
        let t = SpaceModel::free_group(2).unwrap();
        let rho = |p: &BoundaryPoint, q: &BoundaryPoint| t.visual_quasimetric(p, q).unwrap();
        prop_assert!(rho(&xi, &zeta) <= rho(&xi, &eta).max(rho(&eta, &zeta)));
    }

    #[test]
    fn tree_busemann_is_an_exact_cocycle(xi in tree_end(), x in vertex(12), y in vertex(12), z in vertex(12)) {
        let b = |p: &SpacePoint, q: &SpacePoint| busemann(&xi, p, q).unwrap();
        prop_assert_eq!(b(&x, &y) + b(&y, &z), b(&x, &z));
        prop_assert!(b(&x, &y).abs() <= x.distance(&y).unwrap());
    }

    #[test]
    fn tree_action_is_isometric(g in word(16), p in vertex(16), q in vertex(16)) {
        let g = GroupElement::Word(g);
        let d = p.distance(&q).unwrap();
        let gd = g.act(&p).unwrap().distance(&g.act(&q).unwrap()).unwrap();
        prop_assert_eq!(d, gd);
    }

    #[test]
    fn plane_action_is_isometric(g in mat(), p in upper(), q in upper()) {
        let g = GroupElement::Matrix(g);
        let (p, q) = (SpacePoint::Upper(p), SpacePoint::Upper(q));
        let d = p.distance(&q).unwrap();
        let gd = g.act(&p).unwrap().distance(&g.act(&q).unwrap()).unwrap();
        prop_assert!((d - gd).abs() <= 1e-9 * d.max(1.0), "{} vs {}", d, gd);
    }

    #[test]
    fn plane_busemann_cocycle_and_lipschitz(xi in plane_end(), x in upper(), y in upper(), z in upper()) {
        let (x, y, z) = (SpacePoint::Upper(x), SpacePoint::Upper(y), SpacePoint::Upper(z));
        let b = |p: &SpacePoint, q: &SpacePoint| busemann(&xi, p, q).unwrap();
        prop_assert!((b(&x, &y) + b(&y, &z) - b(&x, &z)).abs() <= 1e-8);
        prop_assert!(b(&x, &y).abs() <= x.distance(&y).unwrap() + 1e-12);
    }

    #[test]
    fn plane_busemann_is_equivariant(g in mat(), xi in plane_end(), x in upper(), y in upper()) {
        let (x, y) = (SpacePoint::Upper(x), SpacePoint::Upper(y));
        let g = GroupElement::Matrix(g);
        let moved = busemann(&g.act_boundary(&xi).unwrap(), &g.act(&x).unwrap(), &g.act(&y).unwrap()).unwrap();
        prop_assert!((moved - busemann(&xi, &x, &y).unwrap()).abs() <= 1e-7);
    }
}

#[test]
fn hyperbolic_orbits_are_quasi_geodesic_and_converge() {
    let t = SpaceModel::free_group(2).unwrap();
    let hp = SpaceModel::fuchsian(vec![Mat2::boost(1.0), Mat2::dilation(1.0)]).unwrap();
    let cases = [(&t, "a"), (&t, "abA"), (&t, "abAB"), (&hp, "ab"), (&hp, "aB"), (&hp, "b")];
    for (model, s) in cases {
        let g = model.element_from_word(s).unwrap();
        let Classification::Hyperbolic { attracting, .. } = g.classify() else {
            panic!("{s} should be hyperbolic");
        };
        let o = model.basepoint();
        let ns: Vec<f64> = (1..=40).map(|n| n as f64).collect();
        let ds: Vec<f64> = (1..=40).map(|n| model.displacement(&g.pow(n)).unwrap()).collect();
        let fit = linear_fit(&ns, &ds).unwrap();
        assert!(fit.slope > 0.5, "{s}: slope {}", fit.slope);
        assert!(fit.rms_residual / fit.slope < 0.5, "{s}: residual {}", fit.rms_residual);
        // Gromov product of gⁿo with γ⁺ diverges, so ρ → 0.
        let rho = |n: i64| {
            let p = model.orbit_point(&g.pow(n)).unwrap();
            model.visual_base().powf(-gromov_product(&p, &attracting, &o).unwrap())
        };
        assert!(rho(20) < 1e-3 * rho(1).max(1e-300) || rho(20) < 1e-6, "{s}: {} {}", rho(1), rho(20));
        assert!(rho(20) <= rho(10) + 1e-12);
    }
}
