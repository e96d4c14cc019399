//! The upper half-plane with a Fuchsian group acting by Möbius maps.
//!
//! Boundary points are extended reals. With basepoint `i`, the Gromov
//! product of two boundary points has the closed form
//! `exp(-(ξ|η)_i) = |ξ − η| / sqrt((1 + ξ²)(1 + η²))`, obtained by sending
//! the half-plane to the disk and measuring half the chord between the
//! images; `∞` is the limit `exp(-(ξ|∞)_i) = 1 / sqrt(1 + ξ²)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points with imaginary part at or below this are treated as lost to
/// double precision.
pub const MIN_IMAG: f64 = 1e-300;

/// Determinant tolerance after renormalization.
pub const DET_TOL: f64 = 1e-9;

/// A unit-determinant real 2×2 matrix, stored up to sign (the action of
/// `±M` coincides). The first entry of magnitude above `1e-12` is kept
/// positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds a matrix from row-major entries, rescaling to determinant 1.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "matrix ({a} {b}; {c} {d}) has determinant {det}, expected > 0"
            )));
        }
        if (det - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "matrix ({a} {b}; {c} {d}) has determinant {det}, expected 1"
            )));
        }
        Ok(Mat2 { a, b, c, d }.renormalized())
    }

    /// `(cosh t, sinh t; sinh t, cosh t)`: hyperbolic with fixed points ±1
    /// and translation length `2t`.
    pub fn boost(t: f64) -> Mat2 {
        Mat2 { a: t.cosh(), b: t.sinh(), c: t.sinh(), d: t.cosh() }
    }

    /// `diag(e^t, e^-t)`: `z ↦ e^{2t} z`.
    pub fn dilation(t: f64) -> Mat2 {
        Mat2 { a: t.exp(), b: 0.0, c: 0.0, d: (-t).exp() }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// `|det − 1|` relative to the magnitude of the two products it is
    /// computed from; the only meaningful determinant check once entries are
    /// large.
    pub fn det_defect(&self) -> f64 {
        let scale = (self.a * self.d).abs() + (self.b * self.c).abs();
        (self.det() - 1.0).abs() / scale.max(1.0)
    }

    fn renormalized(self) -> Mat2 {
        let s = self.det().sqrt();
        Mat2 { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }.sign_normalized()
    }

    fn sign_normalized(self) -> Mat2 {
        let lead = [self.a, self.b, self.c, self.d].into_iter().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        if lead < 0.0 {
            Mat2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    /// Product of two unimodular matrices. Not rescaled: once entries pass
    /// ~1e8 the computed determinant is rounding noise, and dividing by it
    /// would shift every later displacement by a constant.
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
        .sign_normalized()
    }

    pub fn inverse(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }.sign_normalized()
    }

    pub fn pow(&self, n: i64) -> Mat2 {
        let mut base = if n >= 0 { *self } else { self.inverse() };
        let mut e = n.unsigned_abs();
        let mut acc = Mat2::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Entries quantized at `resolution`, used as a dedup key.
    pub fn quantized_key(&self, resolution: f64) -> [i64; 4] {
        [self.a, self.b, self.c, self.d].map(|x| (x / resolution).round() as i64)
    }

    pub fn approx_eq(&self, o: &Mat2, tol: f64) -> bool {
        let scale = 1.0f64.max(self.a.abs()).max(self.b.abs()).max(self.c.abs()).max(self.d.abs());
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d]
            .iter()
            .all(|x| x.abs() <= tol * scale)
    }

    /// Möbius action on a point of the half-plane.
    pub fn act_point(&self, z: Complex64) -> Result<Complex64> {
        let den = Complex64::new(self.c * z.re + self.d, self.c * z.im);
        let norm = den.norm_sqr();
        let num = Complex64::new(self.a * z.re + self.b, self.a * z.im);
        let re = (num * den.conj()).re / norm;
        let im = z.im / norm;
        if !(im > MIN_IMAG) || !re.is_finite() || !im.is_finite() {
            return Err(Error::PrecisionLoss(format!(
                "Möbius image has Im z = {im:e} (threshold {MIN_IMAG:e})"
            )));
        }
        Ok(Complex64::new(re, im))
    }

    /// Möbius action on the extended real line; `None` is `∞`.
    pub fn act_boundary(&self, x: Option<f64>) -> Option<f64> {
        match x {
            None => {
                if self.c.abs() < 1e-300 {
                    None
                } else {
                    Some(self.a / self.c)
                }
            }
            Some(x) => {
                let den = self.c * x + self.d;
                if den.abs() < 1e-300 {
                    None
                } else {
                    Some((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// Attracting and repelling fixed points when `|trace| > 2`.
    pub fn hyperbolic_fixed_points(&self) -> Option<(Option<f64>, Option<f64>)> {
        let tr = self.trace();
        if tr.abs() <= 2.0 {
            return None;
        }
        let disc = (tr * tr - 4.0).sqrt();
        if self.c.abs() < 1e-14 {
            // z ↦ (a z + b)/d: fixed at ∞ and at b/(d − a).
            let finite = self.b / (self.d - self.a);
            return Some(if self.a.abs() > self.d.abs() { (None, Some(finite)) } else { (Some(finite), None) });
        }
        let r1 = (self.a - self.d + disc) / (2.0 * self.c);
        let r2 = (self.a - self.d - disc) / (2.0 * self.c);
        // derivative at a fixed point x is 1/(c x + d)^2
        let attracting = |x: f64| (self.c * x + self.d).abs() > 1.0;
        Some(if attracting(r1) { (Some(r1), Some(r2)) } else { (Some(r2), Some(r1)) })
    }
}

/// Hyperbolic distance, in the cancellation-free form
/// `2 asinh(|p − q| / (2 sqrt(Im p · Im q)))`.
pub fn distance(p: Complex64, q: Complex64) -> f64 {
    2.0 * ((p - q).norm() / (2.0 * (p.im * q.im).sqrt())).asinh()
}

/// Busemann cocycle toward the boundary point `xi` (`None` = ∞).
pub fn busemann(xi: Option<f64>, x: Complex64, y: Complex64) -> f64 {
    match xi {
        None => x.im.ln() - y.im.ln(),
        Some(t) => {
            let px = x.im / ((x.re - t).powi(2) + x.im * x.im);
            let py = y.im / ((y.re - t).powi(2) + y.im * y.im);
            px.ln() - py.ln()
        }
    }
}

/// `exp(-(ξ|η)_i)`; zero when the points coincide.
pub fn boundary_overlap(xi: Option<f64>, eta: Option<f64>) -> f64 {
    match (xi, eta) {
        (None, None) => 0.0,
        (Some(x), None) | (None, Some(x)) => 1.0 / (1.0 + x * x).sqrt(),
        (Some(x), Some(y)) => (x - y).abs() / ((1.0 + x * x).sqrt() * (1.0 + y * y).sqrt()),
    }
}
