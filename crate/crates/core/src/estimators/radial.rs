//! The distance chain `|x_n|` of a radial nearest-neighbour walk on the
//! Cayley tree of `F_k`.
//!
//! When the measure puts mass `p_e` on the identity and the same mass `q`
//! on each of the `2k` generators, `|x_n|` is a birth–death chain and
//! `μⁿ(x)` depends on `x` only through `|x|`:
//! `μⁿ(x) = P(|x_n| = |x|) / S(|x|)` with sphere sizes `S(0) = 1`,
//! `S(d) = 2k(2k − 1)^{d−1}`.

use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::space::{GroupElement, SpaceModel};

/// Exact distributions of `|x_n|` for `n = 0..=n_table`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    rank: u16,
    stay: f64,
    per_generator: f64,
    rows: Vec<Vec<f64>>,
}

impl RadialTable {
    /// `None` when the measure is not radial nearest-neighbour.
    pub fn radial_parameters(m: &FiniteMeasure, model: &SpaceModel) -> Option<(f64, f64)> {
        let rank = model.rank()?;
        let mut stay = 0.0;
        let mut q: Option<f64> = None;
        let mut generators = 0;
        for (g, p) in m.iter() {
            let GroupElement::Word(w) = g else { return None };
            match w.len() {
                0 => stay = p,
                1 => {
                    generators += 1;
                    match q {
                        None => q = Some(p),
                        Some(q0) if (q0 - p).abs() <= 1e-15 => {}
                        Some(_) => return None,
                    }
                }
                _ => return None,
            }
        }
        if generators != 2 * rank as usize {
            return None;
        }
        Some((stay, q?))
    }

    pub fn new(m: &FiniteMeasure, model: &SpaceModel, n_table: usize) -> Result<RadialTable> {
        let rank = model
            .rank()
            .ok_or_else(|| Error::Unsupported("the radial chain exists only on tree backends".into()))?;
        let (stay, q) = Self::radial_parameters(m, model).ok_or_else(|| {
            Error::Unsupported("measure is not radial nearest-neighbour (equal mass on every generator)".into())
        })?;
        let r = 2.0 * rank as f64;
        let mut rows = vec![vec![1.0]];
        for n in 0..n_table {
            let prev = &rows[n];
            let mut next = vec![0.0; prev.len() + 1];
            for (d, &p) in prev.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                next[d] += stay * p;
                if d == 0 {
                    next[1] += r * q * p;
                } else {
                    next[d + 1] += (r - 1.0) * q * p;
                    next[d - 1] += q * p;
                }
            }
            rows.push(next);
        }
        Ok(RadialTable { rank, stay, per_generator: q, rows })
    }

    /// `P(|x_n| = d)` for `d = 0..=n`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn n_table(&self) -> usize {
        self.rows.len() - 1
    }

    /// `(p_e, q)`.
    pub fn parameters(&self) -> (f64, f64) {
        (self.stay, self.per_generator)
    }

    /// Number of group elements at distance `d`.
    pub fn sphere_size(&self, d: usize) -> f64 {
        if d == 0 {
            1.0
        } else {
            let r = 2.0 * self.rank as f64;
            r * (r - 1.0).powi(d as i32 - 1)
        }
    }

    /// `L(μⁿ) = E|x_n|`.
    pub fn mean_distance(&self, n: usize) -> f64 {
        self.rows[n].iter().enumerate().map(|(d, p)| d as f64 * p).sum()
    }

    /// `H(μⁿ) = −Σ_d P(|x_n| = d) log(P(|x_n| = d)/S(d))`.
    pub fn entropy(&self, n: usize) -> f64 {
        self.rows[n]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(d, &p)| -p * (p.ln() - self.sphere_size(d).ln()))
            .sum()
    }

    /// `μⁿ(x)` for any `x` with `|x| = d`.
    pub fn point_mass(&self, n: usize, d: usize) -> f64 {
        self.rows[n].get(d).map_or(0.0, |p| p / self.sphere_size(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn srw_rows() {
        let model = SpaceModel::free_group(2).unwrap();
        let srw = FiniteMeasure::simple_random_walk(&model);
        let t = RadialTable::new(&srw, &model, 3).unwrap();
        assert_eq!(t.row(1), &[0.0, 1.0]);
        assert_eq!(t.row(2), &[0.25, 0.0, 0.75]);
        assert_eq!(t.row(3), &[0.0, 0.25 + 0.1875, 0.0, 0.5625]);
        for n in 0..=3 {
            assert!((t.row(n).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!((t.entropy(1) - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_radial() {
        let model = SpaceModel::free_group(2).unwrap();
        let m = FiniteMeasure::new(vec![
            (model.element_from_word("a").unwrap(), 0.5),
            (model.element_from_word("b").unwrap(), 0.5),
        ])
        .unwrap();
        assert!(RadialTable::new(&m, &model, 3).is_err());
    }
}
