//! Geometry backends: the Cayley tree of a free group and the hyperbolic
//! upper half-plane acted on by a Fuchsian group.
//!
//! Both live behind the same enums so that measures, walks and estimators
//! are written once. Every binary operation checks that its operands come
//! from the same backend and fails with [`Error::BackendMismatch`]
//! otherwise.

pub mod delta;
pub mod halfplane;
pub mod tree;
pub mod word;

use std::fmt;

use num_complex::Complex64;

pub use delta::estimate_delta;
pub use halfplane::Mat2;
pub use tree::TreeEnd;
pub use word::{Letter, Word};

use crate::error::{Error, Result};

/// An isometry: a reduced free-group word or a unimodular matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Word(Word),
    Matrix(Mat2),
}

/// A point of the space.
#[derive(Debug, Clone, PartialEq)]
pub enum SpacePoint {
    /// A vertex of the Cayley tree.
    Vertex(Word),
    /// A point `z` of the upper half-plane, `Im z > 0`.
    Upper(Complex64),
}

/// A point of the hyperbolic boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryPoint {
    Tree(TreeEnd),
    Real(f64),
    Infinity,
}

/// Either a point of the space or of its boundary, for operations defined
/// on the compactification.
#[derive(Debug, Clone, Copy)]
pub enum Locus<'a> {
    Inner(&'a SpacePoint),
    Ideal(&'a BoundaryPoint),
}

impl<'a> From<&'a SpacePoint> for Locus<'a> {
    fn from(p: &'a SpacePoint) -> Self {
        Locus::Inner(p)
    }
}

impl<'a> From<&'a BoundaryPoint> for Locus<'a> {
    fn from(p: &'a BoundaryPoint) -> Self {
        Locus::Ideal(p)
    }
}

fn mismatch(what: &str) -> Error {
    Error::BackendMismatch(format!("{what}: operands belong to different backends"))
}

impl GroupElement {
    pub fn is_tree(&self) -> bool {
        matches!(self, GroupElement::Word(_))
    }

    /// Identity of the same backend as `self`.
    pub fn identity_like(&self) -> GroupElement {
        match self {
            GroupElement::Word(_) => GroupElement::Word(Word::identity()),
            GroupElement::Matrix(_) => GroupElement::Matrix(Mat2::IDENTITY),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Word(w) => w.is_empty(),
            GroupElement::Matrix(m) => m.approx_eq(&Mat2::IDENTITY, 1e-12),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Word(a), GroupElement::Word(b)) => Ok(GroupElement::Word(a.mul(b))),
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) => Ok(GroupElement::Matrix(a.mul(b))),
            _ => Err(mismatch("multiply")),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Word(w) => GroupElement::Word(w.inverse()),
            GroupElement::Matrix(m) => GroupElement::Matrix(m.inverse()),
        }
    }

    pub fn pow(&self, n: i64) -> GroupElement {
        match self {
            GroupElement::Word(w) => GroupElement::Word(w.pow(n)),
            GroupElement::Matrix(m) => GroupElement::Matrix(m.pow(n)),
        }
    }

    /// Isometric action on a point of the space.
    pub fn act(&self, p: &SpacePoint) -> Result<SpacePoint> {
        match (self, p) {
            (GroupElement::Word(g), SpacePoint::Vertex(v)) => Ok(SpacePoint::Vertex(g.mul(v))),
            (GroupElement::Matrix(m), SpacePoint::Upper(z)) => Ok(SpacePoint::Upper(m.act_point(*z)?)),
            _ => Err(mismatch("act")),
        }
    }

    /// Extension of the action to the boundary.
    pub fn act_boundary(&self, xi: &BoundaryPoint) -> Result<BoundaryPoint> {
        match (self, xi) {
            (GroupElement::Word(g), BoundaryPoint::Tree(e)) => Ok(BoundaryPoint::Tree(e.act(g)?)),
            (GroupElement::Matrix(m), BoundaryPoint::Real(x)) => Ok(BoundaryPoint::from_extended(m.act_boundary(Some(*x)))),
            (GroupElement::Matrix(m), BoundaryPoint::Infinity) => Ok(BoundaryPoint::from_extended(m.act_boundary(None))),
            _ => Err(mismatch("act on boundary")),
        }
    }

    /// Hyperbolic elements have a quasi-geodesic orbit `n ↦ gⁿo` and two
    /// fixed points on the boundary.
    pub fn classify(&self) -> Classification {
        match self {
            GroupElement::Word(w) => {
                let (u, c) = w.cyclic_decomposition();
                if c.is_empty() {
                    return Classification::Other;
                }
                let plus = TreeEnd::periodic(u.clone(), c.clone()).expect("cyclically reduced core");
                let minus = TreeEnd::periodic(u, c.inverse()).expect("cyclically reduced core");
                Classification::Hyperbolic {
                    attracting: BoundaryPoint::Tree(plus),
                    repelling: BoundaryPoint::Tree(minus),
                }
            }
            GroupElement::Matrix(m) => match m.hyperbolic_fixed_points() {
                Some((p, q)) => Classification::Hyperbolic {
                    attracting: BoundaryPoint::from_extended(p),
                    repelling: BoundaryPoint::from_extended(q),
                },
                None => Classification::Other,
            },
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Word(w) => write!(f, "{w}"),
            GroupElement::Matrix(m) => write!(f, "({:.6} {:.6}; {:.6} {:.6})", m.a, m.b, m.c, m.d),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Hyperbolic { attracting: BoundaryPoint, repelling: BoundaryPoint },
    Other,
}

impl SpacePoint {
    pub fn distance(&self, q: &SpacePoint) -> Result<f64> {
        match (self, q) {
            (SpacePoint::Vertex(x), SpacePoint::Vertex(y)) => Ok(tree::distance(x, y) as f64),
            (SpacePoint::Upper(p), SpacePoint::Upper(q)) => Ok(halfplane::distance(*p, *q)),
            _ => Err(mismatch("distance")),
        }
    }
}

impl BoundaryPoint {
    fn from_extended(x: Option<f64>) -> BoundaryPoint {
        match x {
            Some(x) => BoundaryPoint::Real(x),
            None => BoundaryPoint::Infinity,
        }
    }

    fn extended(&self) -> Option<Option<f64>> {
        match self {
            BoundaryPoint::Real(x) => Some(Some(*x)),
            BoundaryPoint::Infinity => Some(None),
            BoundaryPoint::Tree(_) => None,
        }
    }

    pub fn as_tree(&self) -> Option<&TreeEnd> {
        match self {
            BoundaryPoint::Tree(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Tree(e) => write!(f, "{e}"),
            BoundaryPoint::Real(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "∞"),
        }
    }
}

/// Busemann cocycle `β_ξ(x, y) = lim_t d(y, σ(t)) − d(x, σ(t))` for a ray
/// `σ` ending at `ξ`. Both backends are CAT(−1), so this is an exact
/// cocycle depending only on `ξ`.
pub fn busemann(xi: &BoundaryPoint, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    match (xi, x, y) {
        (BoundaryPoint::Tree(e), SpacePoint::Vertex(x), SpacePoint::Vertex(y)) => Ok(tree::busemann(e, x, y)? as f64),
        (BoundaryPoint::Real(_) | BoundaryPoint::Infinity, SpacePoint::Upper(x), SpacePoint::Upper(y)) => {
            Ok(halfplane::busemann(xi.extended().unwrap(), *x, *y))
        }
        _ => Err(mismatch("busemann")),
    }
}

/// Gromov product `(p|q)_base` on the space and its boundary.
///
/// Tree products involving ends are common-prefix lengths and fail when the
/// available depth cannot separate the arguments. Half-plane products with
/// boundary arguments use the closed forms
/// `(z|ξ)_w = ½[d(w,z) − β_ξ(w,z)]` and
/// `(ξ|η)_w = (ξ|η)_i + ½[β_ξ(i,w) + β_η(i,w)]`, which are the limits of
/// the defining formula along any sequences converging to the ends.
pub fn gromov_product<'a>(p: impl Into<Locus<'a>>, q: impl Into<Locus<'a>>, base: &SpacePoint) -> Result<f64> {
    let (p, q) = (p.into(), q.into());
    match base {
        SpacePoint::Vertex(w) => tree_gromov(p, q, w),
        SpacePoint::Upper(w) => plane_gromov(p, q, *w),
    }
}

fn tree_gromov(p: Locus<'_>, q: Locus<'_>, base: &Word) -> Result<f64> {
    let shift = base.inverse();
    let vertex = |s: &SpacePoint| match s {
        SpacePoint::Vertex(v) => Ok(shift.mul(v)),
        _ => Err(mismatch("gromov_product")),
    };
    let end = |b: &BoundaryPoint| match b {
        BoundaryPoint::Tree(e) => e.act(&shift),
        _ => Err(mismatch("gromov_product")),
    };
    let value = match (p, q) {
        (Locus::Inner(x), Locus::Inner(y)) => {
            let (x, y) = (vertex(x)?, vertex(y)?);
            x.common_prefix_len(&y)
        }
        (Locus::Inner(x), Locus::Ideal(e)) | (Locus::Ideal(e), Locus::Inner(x)) => {
            tree::confluence_vertex_end(&vertex(x)?, &end(e)?)?
        }
        (Locus::Ideal(a), Locus::Ideal(b)) => tree::confluence_ends(&end(a)?, &end(b)?)?,
    };
    Ok(value as f64)
}

fn plane_gromov(p: Locus<'_>, q: Locus<'_>, w: Complex64) -> Result<f64> {
    let i = Complex64::new(0.0, 1.0);
    let upper = |s: &SpacePoint| match s {
        SpacePoint::Upper(z) => Ok(*z),
        _ => Err(mismatch("gromov_product")),
    };
    let ideal = |b: &BoundaryPoint| b.extended().ok_or_else(|| mismatch("gromov_product"));
    match (p, q) {
        (Locus::Inner(x), Locus::Inner(y)) => {
            let (x, y) = (upper(x)?, upper(y)?);
            Ok(0.5 * (halfplane::distance(w, x) + halfplane::distance(w, y) - halfplane::distance(x, y)))
        }
        (Locus::Inner(x), Locus::Ideal(e)) | (Locus::Ideal(e), Locus::Inner(x)) => {
            let x = upper(x)?;
            let xi = ideal(e)?;
            Ok(0.5 * (halfplane::distance(w, x) - halfplane::busemann(xi, w, x)))
        }
        (Locus::Ideal(a), Locus::Ideal(b)) => {
            let (xi, eta) = (ideal(a)?, ideal(b)?);
            let overlap = halfplane::boundary_overlap(xi, eta);
            if overlap <= 0.0 {
                return Err(Error::InsufficientResolution(format!(
                    "boundary points {a} and {b} are indistinguishable in double precision"
                )));
            }
            let at_i = -overlap.ln();
            Ok(at_i + 0.5 * (halfplane::busemann(xi, i, w) + halfplane::busemann(eta, i, w)))
        }
    }
}

/// Backend-specific part of a [`SpaceModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    /// Free group of the given rank acting on its Cayley tree.
    FreeGroup { rank: u16 },
    /// A group generated by the given matrices acting on the half-plane.
    Fuchsian { generators: Vec<Mat2> },
}

/// A geometry backend with its basepoint, hyperbolicity constant and
/// visual-metric base.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceModel {
    backend: Backend,
    delta: f64,
    visual_base: f64,
}

/// Quadruples used when calibrating `δ` for a half-plane model.
pub const DELTA_CALIBRATION_QUADRUPLES: usize = 100_000;
/// Seed used when calibrating `δ` for a half-plane model.
pub const DELTA_CALIBRATION_SEED: u64 = 0x5eed_de17a;

impl SpaceModel {
    pub fn free_group(rank: u16) -> Result<SpaceModel> {
        if rank == 0 {
            return Err(Error::InvalidArgument("free group rank must be >= 1".into()));
        }
        Ok(SpaceModel { backend: Backend::FreeGroup { rank }, delta: 0.0, visual_base: std::f64::consts::E })
    }

    /// A Fuchsian model. `δ` is the sampled four-point defect plus 20 %.
    pub fn fuchsian(generators: Vec<Mat2>) -> Result<SpaceModel> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("fuchsian backend needs at least one generator".into()));
        }
        let mut model = SpaceModel { backend: Backend::Fuchsian { generators }, delta: 0.0, visual_base: std::f64::consts::E };
        let sampled = estimate_delta(&model, DELTA_CALIBRATION_QUADRUPLES, DELTA_CALIBRATION_SEED)?;
        model.delta = 1.2 * sampled;
        Ok(model)
    }

    pub fn with_visual_base(mut self, a: f64) -> Result<SpaceModel> {
        if !(a > 1.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!("visual base must be > 1, got {a}")));
        }
        self.visual_base = a;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<SpaceModel> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be >= 0, got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn is_tree(&self) -> bool {
        matches!(self.backend, Backend::FreeGroup { .. })
    }

    pub fn rank(&self) -> Option<u16> {
        match self.backend {
            Backend::FreeGroup { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn visual_base(&self) -> f64 {
        self.visual_base
    }

    pub fn basepoint(&self) -> SpacePoint {
        match self.backend {
            Backend::FreeGroup { .. } => SpacePoint::Vertex(Word::identity()),
            Backend::Fuchsian { .. } => SpacePoint::Upper(Complex64::new(0.0, 1.0)),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self.backend {
            Backend::FreeGroup { .. } => GroupElement::Word(Word::identity()),
            Backend::Fuchsian { .. } => GroupElement::Matrix(Mat2::IDENTITY),
        }
    }

    /// Generators followed by their inverses, so index `i` and `i + k`
    /// (1-based) are an inverse pair.
    pub fn generators(&self) -> Vec<GroupElement> {
        match &self.backend {
            Backend::FreeGroup { rank } => (1..=*rank as i16)
                .chain((1..=*rank as i16).map(|l| -l))
                .map(|l| GroupElement::Word(Word::from_reduced_unchecked(vec![l])))
                .collect(),
            Backend::Fuchsian { generators } => generators
                .iter()
                .map(|m| GroupElement::Matrix(*m))
                .chain(generators.iter().map(|m| GroupElement::Matrix(m.inverse())))
                .collect(),
        }
    }

    /// Maps a word over generator indices (1-based, `i`/`i+k` inverse) to a
    /// group element of this backend.
    pub fn element_from_indices(&self, indices: &[u32]) -> Result<GroupElement> {
        match &self.backend {
            Backend::FreeGroup { rank } => Ok(GroupElement::Word(Word::from_indices(indices, *rank)?)),
            Backend::Fuchsian { generators } => {
                let k = generators.len() as u32;
                let mut m = Mat2::IDENTITY;
                for &i in indices {
                    let g = if i >= 1 && i <= k {
                        generators[(i - 1) as usize]
                    } else if i > k && i <= 2 * k {
                        generators[(i - k - 1) as usize].inverse()
                    } else {
                        return Err(Error::InvalidArgument(format!("generator index {i} outside 1..={}", 2 * k)));
                    };
                    m = m.mul(&g);
                }
                Ok(GroupElement::Matrix(m))
            }
        }
    }

    /// Parses a letter word (`a..z`, inverses `A..Z`) into an element of this
    /// backend.
    pub fn element_from_word(&self, s: &str) -> Result<GroupElement> {
        let w = Word::parse(s)?;
        let k = match &self.backend {
            Backend::FreeGroup { rank } => *rank,
            Backend::Fuchsian { generators } => generators.len() as u16,
        };
        if w.max_generator() > k {
            return Err(Error::InvalidArgument(format!("word {s:?} uses a generator beyond the {k} available")));
        }
        let indices: Vec<u32> =
            w.letters().iter().map(|&l| if l > 0 { l as u32 } else { (-l) as u32 + k as u32 }).collect();
        self.element_from_indices(&indices)
    }

    /// Checks that an element belongs to this backend.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        match (&self.backend, g) {
            (Backend::FreeGroup { rank }, GroupElement::Word(w)) => {
                if w.max_generator() > *rank {
                    Err(Error::InvalidArgument(format!("word {w} uses generators beyond rank {rank}")))
                } else {
                    Ok(())
                }
            }
            (Backend::Fuchsian { .. }, GroupElement::Matrix(_)) => Ok(()),
            _ => Err(mismatch("model check")),
        }
    }

    /// `g·o`.
    pub fn orbit_point(&self, g: &GroupElement) -> Result<SpacePoint> {
        g.act(&self.basepoint())
    }

    /// `|g| = d(o, g·o)`.
    pub fn displacement(&self, g: &GroupElement) -> Result<f64> {
        match g {
            GroupElement::Word(w) => Ok(w.len() as f64),
            GroupElement::Matrix(m) => {
                let s = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
                // cosh d(i, g i) = (a² + b² + c² + d²) / 2
                if !s.is_finite() {
                    return Err(Error::PrecisionLoss("matrix entries overflowed".into()));
                }
                Ok((0.5 * s).max(1.0).acosh())
            }
        }
    }

    /// The visual quasi-metric `ρ(ξ, η) = a^{−(ξ|η)}` with respect to the
    /// basepoint. Zero when the two points have the same full description.
    pub fn visual_quasimetric(&self, xi: &BoundaryPoint, eta: &BoundaryPoint) -> Result<f64> {
        if xi == eta {
            return Ok(0.0);
        }
        let g = gromov_product(xi, eta, &self.basepoint())?;
        Ok(self.visual_base.powf(-g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn v(s: &str) -> SpacePoint {
        SpacePoint::Vertex(w(s))
    }

    fn z(re: f64, im: f64) -> SpacePoint {
        SpacePoint::Upper(Complex64::new(re, im))
    }

    #[test]
    fn multiply_examples() {
        let g = GroupElement::Word(w("ab"));
        let h = GroupElement::Word(w("Ba"));
        assert_eq!(g.mul(&h).unwrap(), GroupElement::Word(w("aa")));
        assert!(g.mul(&g.inverse()).unwrap().is_identity());
        let m = GroupElement::Matrix(Mat2::boost(0.5));
        assert!(matches!(g.mul(&m), Err(Error::BackendMismatch(_))));
    }

    #[test]
    fn act_examples() {
        let g = GroupElement::Word(w("ba"));
        assert_eq!(g.act(&v("A")).unwrap(), v("b"));
        let g = GroupElement::Word(w("ab"));
        assert_eq!(g.act(&v("A")).unwrap(), v("abA"));
        let id = GroupElement::Matrix(Mat2::IDENTITY);
        assert_eq!(id.act(&z(2.0, 3.0)).unwrap(), z(2.0, 3.0));
        let t = GroupElement::Matrix(Mat2::new(1.0, 1.0, 0.0, 1.0).unwrap());
        assert_eq!(t.act(&z(0.0, 1.0)).unwrap(), z(1.0, 1.0));
    }

    #[test]
    fn act_flags_precision_loss() {
        let g = GroupElement::Matrix(Mat2::dilation(-200.0));
        let p = z(0.0, 1e-200);
        assert!(matches!(g.act(&p), Err(Error::PrecisionLoss(_))));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(v("ab").distance(&v("a")).unwrap(), 1.0);
        assert!((z(0.0, 1.0).distance(&z(0.0, 2.0)).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(z(0.3, 0.4).distance(&z(0.3, 0.4)).unwrap(), 0.0);
    }

    #[test]
    fn gromov_examples() {
        let e = v("e");
        assert_eq!(gromov_product(&v("aba"), &v("abb"), &e).unwrap(), 2.0);
        let x = v("abA");
        assert_eq!(gromov_product(&x, &x, &e).unwrap(), 3.0);
        let i = z(0.0, 1.0);
        // Independent oracle: the three arccosh distances combined by hand.
        let d1 = (1.0f64 + 1.0 / 2.0).acosh();
        let d2 = (1.0f64 + 4.0 / 2.0).acosh();
        let expected = 0.5 * (d1 + d1 - d2);
        let g = gromov_product(&z(1.0, 1.0), &z(-1.0, 1.0), &i).unwrap();
        assert!((g - expected).abs() < 1e-12);
        assert!((g - 0.0811).abs() < 1e-4);
    }

    #[test]
    fn plane_boundary_gromov_is_limit_of_interior() {
        let i = z(0.0, 1.0);
        let base = z(0.4, 1.7);
        let xi = BoundaryPoint::Real(0.8);
        let eta = BoundaryPoint::Real(-2.5);
        let exact = gromov_product(&xi, &eta, &base).unwrap();
        let near = gromov_product(&z(0.8, 1e-7), &z(-2.5, 1e-7), &base).unwrap();
        assert!((exact - near).abs() < 1e-5, "{exact} vs {near}");
        let inf = BoundaryPoint::Infinity;
        let exact = gromov_product(&xi, &inf, &i).unwrap();
        let near = gromov_product(&z(0.8, 1e-7), &z(0.0, 1e7), &i).unwrap();
        assert!((exact - near).abs() < 1e-5);
        let p = z(-0.3, 0.2);
        let exact = gromov_product(&p, &xi, &base).unwrap();
        let near = gromov_product(&p, &z(0.8, 1e-8), &base).unwrap();
        assert!((exact - near).abs() < 1e-6);
    }

    #[test]
    fn visual_quasimetric_examples() {
        let model = SpaceModel::free_group(2).unwrap();
        let xi = BoundaryPoint::Tree(TreeEnd::prefix(w("aba")).unwrap());
        let eta = BoundaryPoint::Tree(TreeEnd::prefix(w("abb")).unwrap());
        let r = model.visual_quasimetric(&xi, &eta).unwrap();
        assert!((r - (-2f64).exp()).abs() < 1e-12);
        assert_eq!(model.visual_quasimetric(&xi, &xi).unwrap(), 0.0);
    }

    #[test]
    fn busemann_examples() {
        let b = busemann(&BoundaryPoint::Infinity, &z(0.0, 1.0), &z(0.0, 2.0)).unwrap();
        assert!((b + 2f64.ln()).abs() < 1e-12);
        let xi = BoundaryPoint::Tree(TreeEnd::prefix(w("bab")).unwrap());
        assert_eq!(busemann(&xi, &v("e"), &v("a")).unwrap(), 1.0);
    }

    #[test]
    fn classify_examples() {
        let a = GroupElement::Word(w("a"));
        match a.classify() {
            Classification::Hyperbolic { attracting, repelling } => {
                let plus = attracting.as_tree().unwrap();
                let minus = repelling.as_tree().unwrap();
                assert!((0..20).all(|i| plus.letter(i) == Some(1)));
                assert!((0..20).all(|i| minus.letter(i) == Some(-1)));
            }
            Classification::Other => panic!("a is hyperbolic"),
        }
        let d = GroupElement::Matrix(Mat2::new(2.0, 0.0, 0.0, 0.5).unwrap());
        assert_eq!(
            d.classify(),
            Classification::Hyperbolic { attracting: BoundaryPoint::Infinity, repelling: BoundaryPoint::Real(0.0) }
        );
        assert_eq!(GroupElement::Word(Word::identity()).classify(), Classification::Other);
        let rot = GroupElement::Matrix(Mat2::new(0.0, -1.0, 1.0, 0.0).unwrap());
        assert_eq!(rot.classify(), Classification::Other);
    }

    #[test]
    fn conjugated_element_fixed_points() {
        // b a B: fixed points b a^∞ and b A^∞
        let g = GroupElement::Word(w("baB"));
        let Classification::Hyperbolic { attracting, .. } = g.classify() else { panic!() };
        let e = attracting.as_tree().unwrap();
        assert_eq!(e.letter(0), Some(2));
        assert_eq!(e.letter(5), Some(1));
        // g fixes its attracting point
        assert_eq!(g.act_boundary(&attracting).unwrap(), attracting);
    }

    #[test]
    fn element_parsing() {
        let model = SpaceModel::free_group(2).unwrap();
        assert_eq!(model.element_from_word("aB").unwrap(), model.element_from_indices(&[1, 4]).unwrap());
        assert!(model.element_from_word("c").is_err());
        assert_eq!(model.generators().len(), 4);
    }
}
