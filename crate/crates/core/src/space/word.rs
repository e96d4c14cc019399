//! Reduced words in a free group.
//!
//! Letters are nonzero `i16`: generator `j` is `+j`, its inverse is `-j`.
//! Configuration files index generators `1..=2k` with `i` and `i + k`
//! forming an inverse pair; [`Word::from_indices`] performs that mapping.

use std::fmt;

use crate::error::{Error, Result};

pub type Letter = i16;

/// A freely reduced word. Never contains a letter followed by its inverse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Result<Self> {
        let mut w = Word::identity();
        for l in letters {
            if l == 0 {
                return Err(Error::InvalidArgument("letter 0 is not a generator".into()));
            }
            w.push(l);
        }
        Ok(w)
    }

    /// Maps generator indices `1..=2*rank` to letters (`i` and `i + rank`
    /// are inverse) and reduces.
    pub fn from_indices(indices: &[u32], rank: u16) -> Result<Self> {
        let k = rank as u32;
        let letters = indices
            .iter()
            .map(|&i| {
                if i == 0 || i > 2 * k {
                    Err(Error::InvalidArgument(format!(
                        "generator index {i} outside 1..={}",
                        2 * k
                    )))
                } else if i <= k {
                    Ok(i as Letter)
                } else {
                    Ok(-((i - k) as Letter))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_letters(letters)
    }

    /// Parses `a..z` as generators and `A..Z` as their inverses; `e` or the
    /// empty string is the identity. Whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            let l = match c {
                'a'..='z' => (c as u8 - b'a' + 1) as Letter,
                'A'..='Z' => -((c as u8 - b'A' + 1) as Letter),
                _ => return Err(Error::InvalidArgument(format!("bad letter {c:?} in word {s:?}"))),
            };
            letters.push(l);
        }
        Word::from_letters(letters)
    }

    /// The letter `g^power` for generator `g` repeated.
    pub fn power_of_letter(letter: Letter, power: i64) -> Self {
        let l = if power >= 0 { letter } else { -letter };
        Word(vec![l; power.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator index used.
    pub fn max_generator(&self) -> u16 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    /// Right-multiplies by one letter, cancelling if needed.
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    /// In-place right multiplication `self <- self * other`.
    pub fn mul_assign_right(&mut self, other: &Word) {
        for &l in &other.0 {
            self.push(l);
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.mul_assign_right(other);
        out
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out.mul_assign_right(&base);
        }
        out
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Word) -> usize {
        common_prefix(&self.0, &other.0)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Writes `self = u c u^-1` with `c` cyclically reduced; returns `(u, c)`.
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let w = &self.0;
        let mut i = 0;
        while w.len() >= 2 * (i + 1) && w[i] == -w[w.len() - 1 - i] {
            i += 1;
        }
        (Word(w[..i].to_vec()), Word(w[i..w.len() - i].to_vec()))
    }

    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|p| p[0] != -p[1]));
        Word(letters)
    }
}

pub(crate) fn common_prefix(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub(crate) fn letter_char(l: Letter) -> char {
    let idx = (l.unsigned_abs() - 1) as u8;
    if idx >= 26 {
        return '?';
    }
    if l > 0 {
        (b'a' + idx) as char
    } else {
        (b'A' + idx) as char
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.0 {
            write!(f, "{}", letter_char(l))?;
        }
        Ok(())
    }
}
