//! The Cayley tree of a free group: ends, Gromov products and Busemann
//! cocycles computed by prefix arithmetic.

use std::fmt;

use super::word::{common_prefix, letter_char, Letter, Word};
use crate::error::{Error, Result};

/// A boundary point of the Cayley tree.
///
/// Either a depth-stamped prefix (a cylinder representative, depth = prefix
/// length) or an exact eventually periodic ray `head · cycle^∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeEnd {
    head: Word,
    cycle: Option<Word>,
}

impl TreeEnd {
    /// A truncated end known to depth `prefix.len()`.
    pub fn prefix(prefix: Word) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidArgument("boundary prefix must have depth >= 1".into()));
        }
        Ok(TreeEnd { head: prefix, cycle: None })
    }

    /// The exact ray `head · cycle^∞`. The cycle must be nonempty and
    /// cyclically reduced, and `head · cycle` must be reduced.
    pub fn periodic(head: Word, cycle: Word) -> Result<Self> {
        let c = cycle.letters();
        if c.is_empty() {
            return Err(Error::InvalidArgument("periodic end needs a nonempty cycle".into()));
        }
        if c.len() > 1 && c[0] == -c[c.len() - 1] {
            return Err(Error::InvalidArgument(format!("cycle {cycle} is not cyclically reduced")));
        }
        if let Some(h) = head.last() {
            if h == -c[0] {
                return Err(Error::InvalidArgument(format!("{head}·{cycle}^∞ is not reduced")));
            }
        }
        Ok(canonical_periodic(head.letters().to_vec(), c.to_vec()))
    }

    /// `None` for exact ends.
    pub fn depth(&self) -> Option<usize> {
        match self.cycle {
            None => Some(self.head.len()),
            Some(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.cycle.is_some()
    }

    pub fn head(&self) -> &Word {
        &self.head
    }

    pub fn cycle(&self) -> Option<&Word> {
        self.cycle.as_ref()
    }

    pub fn letter(&self, i: usize) -> Option<Letter> {
        let h = self.head.letters();
        if i < h.len() {
            return Some(h[i]);
        }
        let c = self.cycle.as_ref()?.letters();
        Some(c[(i - h.len()) % c.len()])
    }

    /// The first `n` letters, or an error if the end is known to less depth.
    pub fn prefix_word(&self, n: usize) -> Result<Word> {
        if let Some(d) = self.depth() {
            if d < n {
                return Err(Error::InsufficientResolution(format!(
                    "end known to depth {d}, depth {n} requested"
                )));
            }
            return Ok(self.head.prefix(n));
        }
        Ok(Word::from_reduced_unchecked((0..n).map(|i| self.letter(i).unwrap()).collect()))
    }

    /// Truncates to a depth-stamped prefix.
    pub fn truncate(&self, n: usize) -> Result<TreeEnd> {
        TreeEnd::prefix(self.prefix_word(n)?)
    }

    fn unrolled(&self, min_len: usize) -> Vec<Letter> {
        match &self.cycle {
            None => self.head.letters().to_vec(),
            Some(_) => (0..min_len.max(self.head.len())).map(|i| self.letter(i).unwrap()).collect(),
        }
    }

    /// Left action `g · ξ`.
    pub fn act(&self, g: &Word) -> Result<TreeEnd> {
        match &self.cycle {
            None => {
                let p = self.head.letters();
                let cancelled = cancellation(g.letters(), p);
                if cancelled >= p.len() {
                    return Err(Error::InsufficientResolution(format!(
                        "translating prefix {} by {g} cancels it entirely",
                        self.head
                    )));
                }
                TreeEnd::prefix(g.mul(&self.head))
            }
            Some(c) => {
                let body = self.unrolled(g.len() + self.head.len() + c.len());
                let head = g.mul(&Word::from_reduced_unchecked(body));
                // `head` ends with a full copy of the (rotated) cycle, so
                // canonicalization re-absorbs it.
                let n = head.len();
                let k = c.len();
                let rot: Vec<Letter> = head.letters()[n - k..].to_vec();
                Ok(canonical_periodic(head.letters()[..n - k].to_vec(), rot))
            }
        }
    }
}

/// Number of letters cancelled when forming `a · b`.
fn cancellation(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().rev().zip(b).take_while(|(x, y)| **x == -**y).count()
}

fn canonical_periodic(mut head: Vec<Letter>, mut cycle: Vec<Letter>) -> TreeEnd {
    // minimal period
    let n = cycle.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| cycle[i] == cycle[i - p]) {
            cycle.truncate(p);
            break;
        }
    }
    // absorb the tail of the head into the cycle
    while let Some(&h) = head.last() {
        if h == *cycle.last().unwrap() {
            head.pop();
            cycle.rotate_right(1);
        } else {
            break;
        }
    }
    TreeEnd {
        head: Word::from_reduced_unchecked(head),
        cycle: Some(Word::from_reduced_unchecked(cycle)),
    }
}

impl fmt::Display for TreeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.cycle {
            None => write!(f, "{}…[depth {}]", self.head, self.head.len()),
            Some(c) => {
                if !self.head.is_empty() {
                    write!(f, "{}", self.head)?;
                }
                write!(f, "(")?;
                for &l in c.letters() {
                    write!(f, "{}", letter_char(l))?;
                }
                write!(f, ")^∞")
            }
        }
    }
}

/// Word-metric distance between two vertices.
pub fn distance(x: &Word, y: &Word) -> usize {
    x.len() + y.len() - 2 * x.common_prefix_len(y)
}

/// Common prefix of a vertex and an end; errors when the end's depth runs
/// out before the vertex word diverges from it.
pub fn confluence_vertex_end(y: &Word, xi: &TreeEnd) -> Result<usize> {
    let yl = y.letters();
    let mut i = 0;
    while i < yl.len() {
        match xi.letter(i) {
            Some(l) if l == yl[i] => i += 1,
            Some(_) => return Ok(i),
            None => {
                return Err(Error::InsufficientResolution(format!(
                    "end of depth {} cannot separate from vertex {y}",
                    xi.head.len()
                )))
            }
        }
    }
    Ok(i)
}

/// Common prefix length of two ends.
pub fn confluence_ends(xi: &TreeEnd, eta: &TreeEnd) -> Result<usize> {
    match (&xi.cycle, &eta.cycle) {
        (Some(c1), Some(c2)) => {
            if xi == eta {
                return Err(Error::InsufficientResolution(format!("ends {xi} and {eta} coincide")));
            }
            // Distinct eventually periodic words differ before this bound.
            let bound = xi.head.len().max(eta.head.len()) + c1.len() * c2.len() + c1.len() + c2.len();
            (0..bound)
                .find(|&i| xi.letter(i) != eta.letter(i))
                .ok_or_else(|| Error::InsufficientResolution("periodic ends agree on the period bound".into()))
        }
        _ => {
            let limit = xi.depth().unwrap_or(usize::MAX).min(eta.depth().unwrap_or(usize::MAX));
            let mut i = 0;
            while i < limit {
                if xi.letter(i) != eta.letter(i) {
                    return Ok(i);
                }
                i += 1;
            }
            Err(Error::InsufficientResolution(format!(
                "ends agree on all {limit} known letters"
            )))
        }
    }
}

/// `β_ξ(x, y) = lim_t d(y, ξ_t) − d(x, ξ_t)`.
pub fn busemann(xi: &TreeEnd, x: &Word, y: &Word) -> Result<i64> {
    let cx = confluence_vertex_end(x, xi)? as i64;
    let cy = confluence_vertex_end(y, xi)? as i64;
    Ok((y.len() as i64 - 2 * cy) - (x.len() as i64 - 2 * cx))
}

/// Common prefix length of two plain letter slices (used by the walker).
pub fn confluence_words(a: &Word, b: &Word) -> usize {
    common_prefix(a.letters(), b.letters())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn periodic_canonical_form() {
        let e1 = TreeEnd::periodic(w("aa"), w("a")).unwrap();
        let e2 = TreeEnd::periodic(Word::identity(), w("aa")).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.letter(10), Some(1));
        assert!(TreeEnd::periodic(w("A"), w("a")).is_err());
    }

    #[test]
    fn act_on_periodic_end_cancels_into_cycle() {
        let a_inf = TreeEnd::periodic(Word::identity(), w("a")).unwrap();
        assert_eq!(a_inf.act(&w("A")).unwrap(), a_inf);
        let b_a = a_inf.act(&w("b")).unwrap();
        assert_eq!(b_a.letter(0), Some(2));
        assert_eq!(b_a.letter(1), Some(1));
        let back = b_a.act(&w("B")).unwrap();
        assert_eq!(back, a_inf);
    }

    #[test]
    fn act_on_prefix_guards_total_cancellation() {
        let xi = TreeEnd::prefix(w("ab")).unwrap();
        assert!(xi.act(&w("BA")).is_err());
        assert_eq!(xi.act(&w("A")).unwrap(), TreeEnd::prefix(w("b")).unwrap());
    }

    #[test]
    fn confluence_reports_resolution_errors() {
        let xi = TreeEnd::prefix(w("ab")).unwrap();
        let eta = TreeEnd::prefix(w("abb")).unwrap();
        assert!(confluence_ends(&xi, &eta).is_err());
        let zeta = TreeEnd::prefix(w("aB")).unwrap();
        assert_eq!(confluence_ends(&xi, &zeta).unwrap(), 1);
        assert!(confluence_vertex_end(&w("abab"), &xi).is_err());
        assert_eq!(confluence_vertex_end(&w("a"), &xi).unwrap(), 1);
    }

    #[test]
    fn busemann_examples() {
        let xi = TreeEnd::prefix(w("bb")).unwrap();
        assert_eq!(busemann(&xi, &Word::identity(), &w("a")).unwrap(), 1);
        let a_inf = TreeEnd::periodic(Word::identity(), w("a")).unwrap();
        assert_eq!(busemann(&a_inf, &Word::identity(), &w("A")).unwrap(), 1);
        assert_eq!(busemann(&a_inf, &Word::identity(), &w("aaa")).unwrap(), -3);
    }
}
