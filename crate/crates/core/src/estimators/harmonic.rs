//! Closed forms for nearest-neighbour walks on free groups.
//!
//! With `F(x)` the probability of ever hitting the generator `x`, the
//! harmonic measure is Markov on letters:
//! `ν[x₁…xₙ] = F(x₁)⋯F(xₙ₋₁)·ν[xₙ]` and
//! `ν[x] = F(x)(1 − F(x⁻¹)) / (1 − F(x)F(x⁻¹))`.
//! The Martin kernel at a generator is `1/F(x)` on the cylinder of `x` and
//! `F(x⁻¹)` elsewhere, which gives `h`, `l` and `dim ν` in finite terms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::space::{GroupElement, Letter, SpaceModel, Word};

const FIXED_POINT_TOL: f64 = 1e-15;
const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestNeighbourTree {
    /// Letters in the order `1, -1, 2, -2, …`.
    pub letters: Vec<Letter>,
    /// `μ(x)` per letter.
    pub step_mass: Vec<f64>,
    /// `F(x)`: probability of ever visiting `x` from the identity.
    pub first_passage: Vec<f64>,
    /// `ν[x]`: harmonic mass of the cylinder of `x`.
    pub first_letter: Vec<f64>,
}

impl NearestNeighbourTree {
    /// Fails unless every atom is the identity or a single letter, and on
    /// recurrent walks.
    pub fn new(m: &FiniteMeasure, model: &SpaceModel) -> Result<NearestNeighbourTree> {
        let rank = model
            .rank()
            .ok_or_else(|| Error::Unsupported("nearest-neighbour closed forms need a tree backend".into()))?;
        let letters: Vec<Letter> = (1..=rank as Letter).flat_map(|j| [j, -j]).collect();
        let mut step_mass = vec![0.0; letters.len()];
        let mut lazy = 0.0;
        for (g, p) in m.iter() {
            let GroupElement::Word(w) = g else {
                return Err(Error::BackendMismatch("matrix atom in a tree measure".into()));
            };
            match w.letters() {
                [] => lazy += p,
                [x] => step_mass[slot(*x)?] += p,
                _ => {
                    return Err(Error::Unsupported(format!("atom {w} is not a generator; closed forms need nearest-neighbour steps")))
                }
            }
        }
        let n = letters.len();
        let mut f = vec![0.0; n];
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let mut next = vec![0.0; n];
            for i in 0..n {
                // Leave by any other step, return to the identity, then try again.
                let detour: f64 = (0..n).filter(|&j| j != i).map(|j| step_mass[j] * f[partner(j)]).sum();
                next[i] = step_mass[i] / (1.0 - lazy - detour);
            }
            let change = next.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            f = next;
            if change < FIXED_POINT_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::EstimatorFailure("first-passage fixed point did not converge".into()));
        }
        let mut first_letter = vec![0.0; n];
        for i in 0..n {
            let back = f[partner(i)];
            let denom = 1.0 - f[i] * back;
            if denom < 1e-12 {
                return Err(Error::Precondition("walk is recurrent; no harmonic measure on the ends".into()));
            }
            first_letter[i] = f[i] * (1.0 - back) / denom;
        }
        Ok(NearestNeighbourTree { letters, step_mass, first_passage: f, first_letter })
    }

    /// `l = Σ μ(x) (1 − 2ν[x⁻¹])`.
    pub fn escape_rate(&self) -> f64 {
        (0..self.letters.len())
            .map(|i| self.step_mass[i] * (1.0 - 2.0 * self.first_letter[partner(i)]))
            .sum()
    }

    /// `h = −Σ μ(g) ∫ log K(g⁻¹, ξ) dν(ξ)`.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for i in 0..self.letters.len() {
            if self.step_mass[i] == 0.0 {
                continue;
            }
            let j = partner(i);
            let on = self.first_letter[j];
            h -= self.step_mass[i] * (xlogy(on, 1.0 / self.first_passage[j]) + xlogy(1.0 - on, self.first_passage[i]));
        }
        h
    }

    /// Harmonic mass of the cylinder of `w`.
    pub fn cylinder_mass(&self, w: &Word) -> Result<f64> {
        let Some((&last, head)) = w.letters().split_last() else {
            return Ok(1.0);
        };
        let mut p = self.first_letter[self.slot_checked(last)?];
        for &x in head {
            p *= self.first_passage[self.slot_checked(x)?];
        }
        Ok(p)
    }

    /// Letter frequencies along `ν`-typical ends: stationary law of the
    /// letter chain `P(x → y) = F(x) ν[y] / ν[x]`, `y ≠ x⁻¹`.
    pub fn letter_frequencies(&self) -> Vec<f64> {
        let n = self.letters.len();
        let live: Vec<bool> = self.first_letter.iter().map(|&v| v > 0.0).collect();
        let mut pi: Vec<f64> = self.first_letter.clone();
        for _ in 0..100_000 {
            let mut next = vec![0.0; n];
            for x in (0..n).filter(|&x| live[x]) {
                for y in (0..n).filter(|&y| y != partner(x)) {
                    next[y] += pi[x] * self.first_passage[x] * self.first_letter[y] / self.first_letter[x];
                }
            }
            let change = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            pi = next;
            if change < 1e-15 {
                break;
            }
        }
        pi
    }

    /// `dim ν` in the visual metric of base `a`, from the letter chain.
    pub fn dimension(&self, a: f64) -> f64 {
        let pi = self.letter_frequencies();
        let per_letter: f64 = (0..pi.len()).filter(|&i| pi[i] > 0.0).map(|i| -pi[i] * self.first_passage[i].ln()).sum();
        per_letter / a.ln()
    }

    fn slot_checked(&self, x: Letter) -> Result<usize> {
        let i = slot(x)?;
        if i >= self.letters.len() {
            return Err(Error::InvalidArgument(format!("letter {x} exceeds the rank")));
        }
        Ok(i)
    }
}

fn slot(x: Letter) -> Result<usize> {
    if x == 0 {
        return Err(Error::InvalidArgument("letter 0".into()));
    }
    let j = (x.unsigned_abs() as usize - 1) * 2;
    Ok(if x > 0 { j } else { j + 1 })
}

fn partner(i: usize) -> usize {
    i ^ 1
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}
