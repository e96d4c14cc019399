use serde::Serialize;

/// How an exact sequence was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Birth–death recursion on `|x_n|`.
    Radial,
    /// Convolution powers with canonical deduplication.
    Convolution,
}

/// The sequence `a_n / n` of a subadditive quantity (`L(μⁿ)` or `H(μⁿ)`),
/// for `n = 1..=n_table`, with its increments `a_{n+1} − a_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSequence {
    pub route: Route,
    /// `totals[n − 1] = a_n`.
    pub totals: Vec<f64>,
}

impl RateSequence {
    pub fn new(route: Route, totals: Vec<f64>) -> RateSequence {
        RateSequence { route, totals }
    }

    pub fn len(&self) -> usize {
        self.totals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.totals.is_empty()
    }

    /// `a_n / n`.
    pub fn rate(&self, n: usize) -> f64 {
        self.totals[n - 1] / n as f64
    }

    pub fn rates(&self) -> Vec<f64> {
        (1..=self.len()).map(|n| self.rate(n)).collect()
    }

    /// `a_{n+1} − a_n` for `n = 1..n_table` (`a_0 = 0` is not included).
    pub fn increments(&self) -> Vec<f64> {
        self.totals.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Final `a_n / n`.
    pub fn last_rate(&self) -> f64 {
        self.rate(self.len())
    }

    /// `|a_N/N − a_{N−1}/(N−1)|`, the error proxy of the final rate.
    pub fn gap(&self) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        (self.rate(self.len()) - self.rate(self.len() - 1)).abs()
    }

    /// The last increment `a_N − a_{N−1}`. For the entropy this is an upper
    /// bound on `h` that converges much faster than `H(μᴺ)/N`: increments
    /// `H(μ^{n+1}) − H(μⁿ) = H(μ) − H(x₁ | x_{n+1})` are nonincreasing in `n`.
    pub fn limit_estimate(&self) -> f64 {
        match self.len() {
            0 => f64::NAN,
            1 => self.totals[0],
            n => self.totals[n - 1] - self.totals[n - 2],
        }
    }

    /// First `n ≥ 2` at which `a_n/n` exceeds `a_{n−1}/(n−1)` by more than
    /// `tol`, if any.
    pub fn monotonicity_violation(&self, tol: f64) -> Option<usize> {
        (2..=self.len()).find(|&n| self.rate(n) > self.rate(n - 1) + tol)
    }
}
