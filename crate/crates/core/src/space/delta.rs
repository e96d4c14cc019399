//! Empirical hyperbolicity constant from sampled quadruples.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{gromov_product, Backend, SpacePoint, SpaceModel, Word};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Maximal word length of sampled tree vertices.
const TREE_RADIUS: usize = 12;
/// Maximal hyperbolic radius of sampled half-plane points.
const PLANE_RADIUS: f64 = 8.0;
const CHUNK: usize = 4096;

/// Largest sampled four-point defect `min{(x|y)_w, (y|z)_w} − (x|z)_w`
/// over `quadruples` random quadruples (all three choices of the middle
/// point). A lower bound for the true `δ`; deterministic in `seed`.
pub fn estimate_delta(model: &SpaceModel, quadruples: usize, seed: u64) -> Result<f64> {
    if quadruples == 0 {
        return Err(Error::InvalidArgument("estimate_delta needs at least one quadruple".into()));
    }
    let chunks = quadruples.div_ceil(CHUNK);
    let maxima = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let n = CHUNK.min(quadruples - c * CHUNK);
            let mut best = 0.0f64;
            for _ in 0..n {
                let q: [SpacePoint; 4] = std::array::from_fn(|_| random_point(model, &mut rng));
                best = best.max(four_point_defect(&q)?);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(maxima.into_iter().fold(0.0, f64::max))
}

/// Largest defect of the `δ`-inequality on one quadruple `(x, y, z, w)`
/// with base `w`.
pub fn four_point_defect(q: &[SpacePoint; 4]) -> Result<f64> {
    let [x, y, z, w] = q;
    let xy = gromov_product(x, y, w)?;
    let yz = gromov_product(y, z, w)?;
    let xz = gromov_product(x, z, w)?;
    let d1 = xy.min(yz) - xz;
    let d2 = xy.min(xz) - yz;
    let d3 = xz.min(yz) - xy;
    Ok(d1.max(d2).max(d3).max(0.0))
}

pub(crate) fn random_point<R: Rng>(model: &SpaceModel, rng: &mut R) -> SpacePoint {
    match model.backend() {
        Backend::FreeGroup { rank } => {
            let len = rng.random_range(0..=TREE_RADIUS);
            SpacePoint::Vertex(random_word(*rank, len, rng))
        }
        Backend::Fuchsian { .. } => {
            let r = rng.random_range(0.0..PLANE_RADIUS);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            SpacePoint::Upper(disk_to_plane(Complex64::from_polar((0.5 * r).tanh(), theta)))
        }
    }
}

/// A uniformly random reduced word of the given length.
pub(crate) fn random_word<R: Rng>(rank: u16, len: usize, rng: &mut R) -> Word {
    let k = rank as i16;
    let mut letters: Vec<i16> = Vec::with_capacity(len);
    while letters.len() < len {
        let i = rng.random_range(0..2 * k);
        let l = if i < k { i + 1 } else { -(i - k + 1) };
        if letters.last() == Some(&-l) {
            continue;
        }
        letters.push(l);
    }
    Word::from_reduced_unchecked(letters)
}

/// Cayley map from the unit disk (centre ↦ i) to the upper half-plane.
pub(crate) fn disk_to_plane(w: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    i * (1.0 + w) / (1.0 - w)
}
