//! Boundary structures of the free-group tree: cylinders and their masses,
//! the ball covers `{B(ξ_w, λ a^{−(n−1)}) : |w| = n}` and their
//! multiplicity, and the concentration of `ν_k` near the orbit of `γ^±`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{open_set_mass, BoundaryRegion, EmpiricalBoundaryMeasure, MassEstimate};
use crate::measure::MuKFamily;
use crate::space::tree::distance;
use crate::space::{BoundaryPoint, Letter, SpaceModel, TreeEnd, Word};
use crate::stats::{mann_kendall, MannKendall};
use crate::walker::{sample_boundary, BoundaryConfig};

/// The set of ends with a fixed reduced prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Cylinder {
    pub prefix: Word,
}

impl Cylinder {
    pub fn new(prefix: Word) -> Cylinder {
        Cylinder { prefix }
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn contains(&self, e: &TreeEnd) -> Result<bool> {
        Ok(e.prefix_word(self.depth())? == self.prefix)
    }
}

/// All reduced words of length `n` in `F_k`, in lexicographic letter order.
pub fn words_of_length(rank: u16, n: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (1..=rank as Letter).chain((1..=rank as Letter).map(|l| -l)).collect();
    let mut out: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * rank as usize - 1));
        for w in &out {
            for &l in &letters {
                if w.last() != Some(&-l) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|v| Word::from_letters(v).expect("reduced by construction")).collect()
}

/// Depth-`n` cylinders partitioning `∂F_k`.
pub fn cylinders(rank: u16, n: usize) -> Vec<Cylinder> {
    words_of_length(rank, n).into_iter().map(Cylinder::new).collect()
}

/// Mass of a cylinder under the uniform measure, `(2k)⁻¹(2k − 1)^{−(n−1)}`.
pub fn uniform_cylinder_mass(rank: u16, c: &Cylinder) -> f64 {
    match c.depth() {
        0 => 1.0,
        n => {
            let r = 2.0 * rank as f64;
            1.0 / (r * (r - 1.0).powi(n as i32 - 1))
        }
    }
}

/// Empirical mass of a cylinder; samples too shallow to decide are
/// excluded from both counts.
pub fn cylinder_mass(nu: &EmpiricalBoundaryMeasure, c: &Cylinder) -> Result<MassEstimate> {
    open_set_mass(nu, &BoundaryRegion::Cylinders(vec![c.prefix.clone()]), 0.99)
}

/// Open or closed balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallKind {
    Open,
    Closed,
}

/// Balls `B(ξ_w, r)` around one end per depth-`n` cylinder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCover {
    pub depth: usize,
    pub radius: f64,
    pub kind: BallKind,
    pub visual_base: f64,
    /// `ξ_w = w·x^∞` with `x` the last letter of `w`.
    #[serde(skip)]
    pub centers: Vec<TreeEnd>,
    /// Largest number of balls containing a test point.
    pub multiplicity: usize,
    /// Every test point lies in some ball.
    pub covers: bool,
    /// Largest `d(w, w′)` over pairs of intersecting balls.
    pub max_center_distance: usize,
}

/// Gromov products `t` with `a^{−t}` inside the ball: `t ≥ threshold`.
fn product_threshold(radius: f64, a: f64, kind: BallKind) -> usize {
    let t = -radius.ln() / a.ln();
    let snapped = t.round();
    let integral = (t - snapped).abs() < 1e-9;
    match (kind, integral) {
        (BallKind::Closed, true) => snapped.max(0.0) as usize,
        (BallKind::Open, true) => (snapped + 1.0).max(0.0) as usize,
        (_, false) => t.ceil().max(0.0) as usize,
    }
}

/// The cover of `∂F_k` by balls of radius `radius` centered at `ξ_w`,
/// `|w| = n`, with its multiplicity computed exhaustively.
///
/// Test points are every center together with `w·y·y^∞` for every
/// depth-`n` word `w` and admissible letter `y`. Ball membership depends
/// only on the first `threshold` letters, so the counts are looked up by
/// prefix.
pub fn build_cover(model: &SpaceModel, n: usize, radius: f64, kind: BallKind) -> Result<BoundaryCover> {
    let rank = model
        .rank()
        .ok_or_else(|| Error::Unsupported("ball covers are built on tree backends only".into()))?;
    if n == 0 {
        return Err(Error::InvalidArgument("cover depth must be >= 1".into()));
    }
    let a = model.visual_base();
    let t = product_threshold(radius, a, kind);
    let words = words_of_length(rank, n);
    let centers: Vec<TreeEnd> = words
        .iter()
        .map(|w| TreeEnd::periodic(w.clone(), Word::power_of_letter(w.last().unwrap(), 1)))
        .collect::<Result<_>>()?;
    let key = |e: &TreeEnd| e.prefix_word(t).expect("exact ends");
    let mut per_prefix: HashMap<Word, Vec<usize>> = HashMap::new();
    for (i, c) in centers.iter().enumerate() {
        per_prefix.entry(key(c)).or_default().push(i);
    }
    let letters: Vec<Letter> = (1..=rank as Letter).chain((1..=rank as Letter).map(|l| -l)).collect();
    let mut multiplicity = 0;
    let mut covers = true;
    let mut max_center_distance = 0;
    let mut probe = |p: &TreeEnd| {
        let hits = per_prefix.get(&key(p)).map_or(&[][..], |v| &v[..]);
        multiplicity = multiplicity.max(hits.len());
        covers &= !hits.is_empty();
        // hits are in lexicographic order, so the extreme pair has the
        // shortest common prefix
        if let (Some(&first), Some(&last)) = (hits.first(), hits.last()) {
            max_center_distance = max_center_distance.max(distance(&words[first], &words[last]));
        }
    };
    for c in &centers {
        probe(c);
    }
    for w in &words {
        for &y in &letters {
            if w.last() == Some(-y) {
                continue;
            }
            let p = TreeEnd::periodic(w.mul(&Word::power_of_letter(y, 1)), Word::power_of_letter(y, 1))?;
            probe(&p);
        }
    }
    Ok(BoundaryCover {
        depth: n,
        radius,
        kind,
        visual_base: a,
        centers,
        multiplicity,
        covers,
        max_center_distance,
    })
}

/// The radius `λ a^{−(n−1)}` with `λ = 1`.
pub fn cover_radius(model: &SpaceModel, n: usize) -> f64 {
    model.visual_base().powi(-(n as i32 - 1))
}

/// One row of the atom-concentration table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomRow {
    pub k: u32,
    pub radius: f64,
    pub mass: MassEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomConcentration {
    pub depth: usize,
    pub rows: Vec<AtomRow>,
    pub trend: MannKendall,
}

/// The union of the depth-`depth` cylinders around `g·γ^±` for `|g| ≤ 1`.
pub fn atom_region(fam: &MuKFamily, model: &SpaceModel, depth: usize) -> Result<BoundaryRegion> {
    let mut translates = vec![model.identity()];
    translates.extend(model.generators());
    let mut prefixes = Vec::new();
    for g in &translates {
        for p in [fam.attracting(), fam.repelling()] {
            let BoundaryPoint::Tree(e) = g.act_boundary(p)? else {
                return Err(Error::Unsupported("atom concentration is defined on tree backends".into()));
            };
            let w = e.prefix_word(depth)?;
            if !prefixes.contains(&w) {
                prefixes.push(w);
            }
        }
    }
    Ok(BoundaryRegion::Cylinders(prefixes))
}

/// `ν̂_k`-mass of the closed balls of radius `a^{−depth}` around
/// `g·γ^±`, `|g| ≤ 1`, for each `k`, with a Mann–Kendall test for an
/// increasing trend.
pub fn atom_concentration(
    fam: &MuKFamily,
    model: &SpaceModel,
    k_grid: &[u32],
    depth: usize,
    boundary: &BoundaryConfig,
) -> Result<AtomConcentration> {
    let region = atom_region(fam, model, depth)?;
    let radius = model.visual_base().powi(-(depth as i32));
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let mu = fam.make_mu_k(k)?;
        let mut cfg = boundary.clone();
        cfg.seed = crate::rng::derive_seed(boundary.seed, &format!("atoms/{k}"));
        let nu = EmpiricalBoundaryMeasure::new(sample_boundary(&mu, model, &cfg)?, model.visual_base())?;
        rows.push(AtomRow { k, radius, mass: open_set_mass(&nu, &region, 0.99)? });
    }
    let trend = mann_kendall(&rows.iter().map(|r| r.mass.mass).collect::<Vec<_>>());
    Ok(AtomConcentration { depth, rows, trend })
}
