//! Finitely supported probability measures on the group, their entropy,
//! first moment and convolution powers, and the `μ_k` family that pushes
//! the escape rate to infinity at bounded entropy.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::space::{BoundaryPoint, Classification, GroupElement, SpaceModel, Word};

/// Masses must sum to one within this tolerance.
pub const MASS_TOL: f64 = 1e-12;
/// Resolution of the quantized dedup key for matrices.
pub const MATRIX_KEY_RESOLUTION: f64 = 1e-9;
/// Default cap on the support size of a convolution.
pub const DEFAULT_SUPPORT_CAP: usize = 1_000_000;

/// Canonical dedup key: the reduced word, or quantized matrix entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalKey {
    Word(Word),
    Matrix([i64; 4]),
}

pub fn canonical_key(g: &GroupElement) -> Result<CanonicalKey> {
    canonical_key_at(g, MATRIX_KEY_RESOLUTION)
}

fn canonical_key_at(g: &GroupElement, resolution: f64) -> Result<CanonicalKey> {
    match g {
        GroupElement::Word(w) => Ok(CanonicalKey::Word(w.clone())),
        GroupElement::Matrix(m) => {
            let max = [m.a, m.b, m.c, m.d].iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if !(max / resolution < 9.0e18) {
                return Err(Error::ResourceLimit(format!(
                    "matrix entries of size {max:e} exceed the quantized key range"
                )));
            }
            Ok(CanonicalKey::Matrix(m.quantized_key(resolution)))
        }
    }
}

fn same_element(a: &GroupElement, b: &GroupElement) -> bool {
    match (a, b) {
        (GroupElement::Word(x), GroupElement::Word(y)) => x == y,
        (GroupElement::Matrix(x), GroupElement::Matrix(y)) => x.approx_eq(y, 1e-11),
        _ => false,
    }
}

/// A finitely supported probability measure on the group.
///
/// The support is deduplicated in canonical form and stored in canonical
/// key order, which fixes the inverse-CDF ordering used by the walker.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    support: Vec<GroupElement>,
    mass: Vec<f64>,
}

impl FiniteMeasure {
    /// Builds a measure from atoms, merging repeated elements.
    pub fn new(atoms: Vec<(GroupElement, f64)>) -> Result<FiniteMeasure> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let tree = atoms[0].0.is_tree();
        if atoms.iter().any(|(g, _)| g.is_tree() != tree) {
            return Err(Error::BackendMismatch("measure atoms belong to different backends".into()));
        }
        let mut merged: HashMap<CanonicalKey, (GroupElement, f64)> = HashMap::new();
        for (g, p) in atoms {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidMeasure(format!("mass {p} at {g} is not positive")));
            }
            merge(&mut merged, g, p)?;
        }
        let total: f64 = merged.values().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self::from_map(merged))
    }

    fn from_map(map: HashMap<CanonicalKey, (GroupElement, f64)>) -> FiniteMeasure {
        let mut entries: Vec<_> = map.into_iter().collect();
        entries.sort_by(|a, b| order_key(&a.0).cmp(&order_key(&b.0)));
        let (support, mass) = entries.into_iter().map(|(_, v)| v).unzip();
        FiniteMeasure { support, mass }
    }

    pub fn dirac(g: GroupElement) -> FiniteMeasure {
        FiniteMeasure { support: vec![g], mass: vec![1.0] }
    }

    /// Uniform measure on the model's generators and their inverses.
    pub fn simple_random_walk(model: &SpaceModel) -> FiniteMeasure {
        let gens = model.generators();
        let p = 1.0 / gens.len() as f64;
        FiniteMeasure::new(gens.into_iter().map(|g| (g, p)).collect()).expect("generators are distinct")
    }

    pub fn support(&self) -> &[GroupElement] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, f64)> {
        self.support.iter().zip(self.mass.iter().copied())
    }

    pub fn is_tree(&self) -> bool {
        self.support[0].is_tree()
    }

    pub fn mass_of(&self, g: &GroupElement) -> f64 {
        self.iter().filter(|(h, _)| same_element(h, g)).map(|(_, p)| p).sum()
    }

    /// Shannon entropy, natural log.
    pub fn entropy(&self) -> f64 {
        self.mass.iter().map(|&p| -p * p.ln()).sum()
    }

    /// `Σ μ(g) d(o, g·o)`.
    pub fn first_moment(&self, model: &SpaceModel) -> Result<f64> {
        let mut total = 0.0;
        for (g, p) in self.iter() {
            total += p * model.displacement(g)?;
        }
        Ok(total)
    }

    /// Largest `d(o, g·o)` over the support.
    pub fn max_step(&self, model: &SpaceModel) -> Result<f64> {
        let mut m = 0.0f64;
        for g in &self.support {
            m = m.max(model.displacement(g)?);
        }
        Ok(m)
    }

    /// `μ(g) = μ(g⁻¹)` for every atom.
    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(g, p)| (self.mass_of(&g.inverse()) - p).abs() <= MASS_TOL)
    }

    /// Pushforward of `self ⊗ other` under multiplication.
    pub fn convolve(&self, other: &FiniteMeasure) -> Result<FiniteMeasure> {
        self.convolve_capped(other, DEFAULT_SUPPORT_CAP)
    }

    pub fn convolve_capped(&self, other: &FiniteMeasure, cap: usize) -> Result<FiniteMeasure> {
        if self.is_tree() != other.is_tree() {
            return Err(Error::BackendMismatch("convolve: measures on different backends".into()));
        }
        let mut out: HashMap<CanonicalKey, (GroupElement, f64)> = HashMap::new();
        for (g, p) in self.iter() {
            for (h, q) in other.iter() {
                merge(&mut out, g.mul(h)?, p * q)?;
                if out.len() > cap {
                    return Err(Error::ResourceLimit(format!(
                        "convolution support exceeds the cap of {cap} elements"
                    )));
                }
            }
        }
        Ok(Self::from_map(out))
    }

    /// Mixture `Σ wᵢ μᵢ`.
    pub fn mixture(parts: &[(f64, &FiniteMeasure)]) -> Result<FiniteMeasure> {
        let atoms = parts
            .iter()
            .flat_map(|(w, m)| m.iter().map(move |(g, p)| (g.clone(), w * p)))
            .collect();
        FiniteMeasure::new(atoms)
    }

    /// Partial check that the support generates the group as a semigroup:
    /// every product of at most two generators (and their inverses) of the
    /// model must be reached by products of at most `max_factors` support
    /// elements. Full verification is undecidable in general.
    pub fn generates_ball(&self, model: &SpaceModel, max_factors: usize) -> Result<bool> {
        const RES: f64 = 1e-6;
        const CAP: usize = 200_000;
        let gens = model.generators();
        let mut targets = vec![model.identity()];
        for g in &gens {
            targets.push(g.clone());
            for h in &gens {
                targets.push(g.mul(h)?);
            }
        }
        let mut reached: HashMap<CanonicalKey, ()> = HashMap::new();
        let mut frontier: Vec<GroupElement> = self.support.clone();
        for _ in 0..max_factors {
            let mut next = Vec::new();
            for g in frontier {
                if reached.insert(canonical_key_at(&g, RES)?, ()).is_none() {
                    next.push(g);
                }
            }
            if reached.len() > CAP {
                break;
            }
            frontier = next
                .iter()
                .flat_map(|g| self.support.iter().map(move |s| g.mul(s)))
                .collect::<Result<Vec<_>>>()?;
        }
        for g in targets {
            if !reached.contains_key(&canonical_key_at(&g, RES)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn order_key(k: &CanonicalKey) -> (usize, &CanonicalKey) {
    match k {
        CanonicalKey::Word(w) => (w.len(), k),
        CanonicalKey::Matrix(_) => (0, k),
    }
}

fn merge(map: &mut HashMap<CanonicalKey, (GroupElement, f64)>, g: GroupElement, p: f64) -> Result<()> {
    let key = canonical_key(&g)?;
    match map.get_mut(&key) {
        Some((h, q)) => {
            if !same_element(h, &g) {
                return Err(Error::Collision(format!(
                    "{h} and {g} share the quantized key {key:?} but differ beyond tolerance"
                )));
            }
            *q += p;
        }
        None => {
            map.insert(key, (g, p));
        }
    }
    Ok(())
}

/// The family `μ_k = ½μ + ¼(δ_{γ₀^k} + δ_{γ₀^{−k}})` for a base measure
/// `μ` and a hyperbolic element `γ₀`.
#[derive(Debug, Clone)]
pub struct MuKFamily {
    base: FiniteMeasure,
    gamma0: GroupElement,
    attracting: BoundaryPoint,
    repelling: BoundaryPoint,
}

impl MuKFamily {
    pub fn new(base: FiniteMeasure, gamma0: GroupElement, model: &SpaceModel) -> Result<MuKFamily> {
        model.check(&gamma0)?;
        for g in base.support() {
            model.check(g)?;
        }
        let Classification::Hyperbolic { attracting, repelling } = gamma0.classify() else {
            return Err(Error::Precondition(format!("γ₀ = {gamma0} is not hyperbolic")));
        };
        if !base.generates_ball(model, 4)? {
            return Err(Error::Precondition(
                "base measure support does not reach the radius-2 ball of the generating set".into(),
            ));
        }
        Ok(MuKFamily { base, gamma0, attracting, repelling })
    }

    pub fn base(&self) -> &FiniteMeasure {
        &self.base
    }

    pub fn gamma0(&self) -> &GroupElement {
        &self.gamma0
    }

    /// `γ⁺`.
    pub fn attracting(&self) -> &BoundaryPoint {
        &self.attracting
    }

    /// `γ⁻`.
    pub fn repelling(&self) -> &BoundaryPoint {
        &self.repelling
    }

    pub fn make_mu_k(&self, k: u32) -> Result<FiniteMeasure> {
        let k = k as i64;
        let plus = self.gamma0.pow(k);
        let minus = self.gamma0.pow(-k);
        let mut atoms: Vec<(GroupElement, f64)> = self.base.iter().map(|(g, p)| (g.clone(), 0.5 * p)).collect();
        atoms.push((plus, 0.25));
        atoms.push((minus, 0.25));
        FiniteMeasure::new(atoms)
    }

    /// `(3 log 2)/2 + H(μ)/2`, the `k`-independent ceiling on `H(μ_k)`.
    pub fn entropy_ceiling(&self) -> f64 {
        1.5 * LN_2 + 0.5 * self.base.entropy()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Mat2;

    fn f2() -> SpaceModel {
        SpaceModel::free_group(2).unwrap()
    }

    fn el(model: &SpaceModel, s: &str) -> GroupElement {
        model.element_from_word(s).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let srw = FiniteMeasure::simple_random_walk(&f2());
        assert!((srw.entropy() - 4f64.ln()).abs() < 1e-12);
        assert_eq!(FiniteMeasure::dirac(f2().identity()).entropy(), 0.0);
        let m = f2();
        let mu1 = FiniteMeasure::new(vec![
            (el(&m, "a"), 3.0 / 8.0),
            (el(&m, "A"), 3.0 / 8.0),
            (el(&m, "b"), 1.0 / 8.0),
            (el(&m, "B"), 1.0 / 8.0),
        ])
        .unwrap();
        // direct summation
        let oracle = -2.0 * (3.0 / 8.0) * (3.0f64 / 8.0).ln() - 2.0 * (1.0 / 8.0) * (1.0f64 / 8.0).ln();
        assert!((mu1.entropy() - oracle).abs() < 1e-12);
        assert!((mu1.entropy() - 1.2555).abs() < 1e-4);
    }

    #[test]
    fn first_moment_examples() {
        let m = f2();
        let srw = FiniteMeasure::simple_random_walk(&m);
        assert!((srw.first_moment(&m).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(FiniteMeasure::dirac(m.identity()).first_moment(&m).unwrap(), 0.0);
        let fam = MuKFamily::new(srw, el(&m, "a"), &m).unwrap();
        for k in [0u32, 1, 3, 7, 20] {
            let mk = fam.make_mu_k(k).unwrap();
            let oracle: f64 = mk.iter().map(|(g, p)| p * m.displacement(g).unwrap()).sum();
            assert!((mk.first_moment(&m).unwrap() - oracle).abs() < 1e-12);
            assert!((oracle - (0.5 + 0.5 * k as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_examples() {
        let m = f2();
        let da = FiniteMeasure::dirac(el(&m, "a"));
        let db = FiniteMeasure::dirac(el(&m, "b"));
        assert_eq!(da.convolve(&db).unwrap(), FiniteMeasure::dirac(el(&m, "ab")));
        let srw = FiniteMeasure::simple_random_walk(&m);
        let sq = srw.convolve(&srw).unwrap();
        assert!((sq.mass_of(&m.identity()) - 0.25).abs() < 1e-15);
        assert_eq!(sq.len(), 13);
        let total: f64 = sq.masses().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(srw.convolve(&FiniteMeasure::dirac(m.identity())).unwrap(), srw);
    }

    #[test]
    fn convolution_cap_is_enforced() {
        let m = f2();
        let srw = FiniteMeasure::simple_random_walk(&m);
        let sq = srw.convolve(&srw).unwrap();
        assert!(matches!(sq.convolve_capped(&sq, 20), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn matrix_convolution_dedups() {
        let model = SpaceModel::fuchsian(vec![Mat2::boost(1.0), Mat2::dilation(1.0)]).unwrap();
        let srw = FiniteMeasure::simple_random_walk(&model);
        let sq = srw.convolve(&srw).unwrap();
        assert_eq!(sq.len(), 13);
        assert!((sq.mass_of(&model.identity()) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn mu_k_examples() {
        let m = f2();
        let srw = FiniteMeasure::simple_random_walk(&m);
        let fam = MuKFamily::new(srw.clone(), el(&m, "a"), &m).unwrap();
        let mu3 = fam.make_mu_k(3).unwrap();
        assert!((mu3.mass_of(&el(&m, "aaa")) - 0.25).abs() < 1e-15);
        assert!((mu3.mass_of(&el(&m, "a")) - 0.125).abs() < 1e-15);
        assert!((mu3.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(mu3.is_symmetric());
        let mu0 = fam.make_mu_k(0).unwrap();
        assert!((mu0.mass_of(&m.identity()) - 0.5).abs() < 1e-15);
        assert_eq!(mu0.len(), 5);
        for k in 0..=50 {
            assert!(fam.make_mu_k(k).unwrap().entropy() <= fam.entropy_ceiling() + 1e-12);
        }
    }

    #[test]
    fn mu_k_requires_hyperbolic_and_generating() {
        let m = f2();
        let srw = FiniteMeasure::simple_random_walk(&m);
        assert!(MuKFamily::new(srw, m.identity(), &m).is_err());
        let da = FiniteMeasure::dirac(el(&m, "a"));
        assert!(MuKFamily::new(da, el(&m, "a"), &m).is_err());
    }

    #[test]
    fn invalid_measures_rejected() {
        let m = f2();
        assert!(FiniteMeasure::new(vec![(el(&m, "a"), 0.5)]).is_err());
        assert!(FiniteMeasure::new(vec![(el(&m, "a"), 1.5), (el(&m, "b"), -0.5)]).is_err());
        let merged = FiniteMeasure::new(vec![(el(&m, "a"), 0.5), (el(&m, "aBb"), 0.5)]).unwrap();
        assert_eq!(merged.len(), 1);
    }
}
