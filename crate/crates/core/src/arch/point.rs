//! Points of the complex projective line as normalized coordinate pairs.
//!
//! A point stores one representative `(c0, c1)` scaled so that
//! `max(|c0|, |c1|) = 1`. That keeps every kernel evaluation inside a tame
//! floating range: Euclidean norms of representatives live in `[1, sqrt 2]`,
//! and wedge products of two representatives are at most 2 in modulus.

use crate::error::Error;
use crate::exact::Rat;
use crate::util::rat_to_f64;
use crate::Result;
use num::complex::Complex64;
use num::Signed;

/// The affine coordinate is `c1 / c0`; infinity is `(0, 1)`.
#[derive(Clone, Copy, Debug)]
pub struct PPoint {
    c0: Complex64,
    c1: Complex64,
}

impl PPoint {
    /// Builds a point from any nonzero coordinate pair.
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        let m = c0.norm().max(c1.norm());
        if !m.is_finite() {
            return Err(Error::numeric("non-finite projective coordinates"));
        }
        if m == 0.0 {
            return Err(Error::degenerate("projective point needs a nonzero pair"));
        }
        Ok(Self { c0: c0 / m, c1: c1 / m })
    }

    pub fn from_affine(z: Complex64) -> Self {
        if z.norm() <= 1.0 {
            Self { c0: Complex64::new(1.0, 0.0), c1: z }
        } else {
            // Scale by 1/z so the representative stays bounded even for
            // affine inputs near overflow.
            let w = robust_div(Complex64::new(1.0, 0.0), z);
            Self { c0: w, c1: Complex64::new(1.0, 0.0) }
        }
    }

    pub fn infinity() -> Self {
        Self { c0: Complex64::new(0.0, 0.0), c1: Complex64::new(1.0, 0.0) }
    }

    pub fn zero() -> Self {
        Self { c0: Complex64::new(1.0, 0.0), c1: Complex64::new(0.0, 0.0) }
    }

    /// Exact rational point `x1/x0` pushed to floating coordinates.
    pub fn from_rational(x0: &Rat, x1: &Rat) -> Result<Self> {
        // Divide by the larger entry exactly, then round; this is safe for
        // heights far beyond f64 range.
        let a0 = rat_to_f64(x0);
        let a1 = rat_to_f64(x1);
        if a0.abs().max(a1.abs()) > 0.0 && a0.is_finite() && a1.is_finite() {
            return Self::new(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0));
        }
        if x0.abs() >= x1.abs() {
            if num::Zero::is_zero(x0) {
                return Err(Error::degenerate("projective point needs a nonzero pair"));
            }
            let r = rat_to_f64(&(x1 / x0));
            Self::new(Complex64::new(1.0, 0.0), Complex64::new(r, 0.0))
        } else {
            let r = rat_to_f64(&(x0 / x1));
            Self::new(Complex64::new(r, 0.0), Complex64::new(1.0, 0.0))
        }
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn is_infinity(&self) -> bool {
        self.c0.norm() == 0.0
    }

    /// Affine coordinate, `None` at infinity.
    pub fn affine(&self) -> Option<Complex64> {
        if self.is_infinity() {
            None
        } else {
            Some(robust_div(self.c1, self.c0))
        }
    }

    /// ln of the Euclidean norm of the stored representative.
    pub fn ln_norm(&self) -> f64 {
        0.5 * (self.c0.norm_sqr() + self.c1.norm_sqr()).ln()
    }

    /// ln ||(1, z)|| for the affine coordinate z; +inf at infinity.
    pub fn ln_norm_affine(&self) -> f64 {
        if self.is_infinity() {
            f64::INFINITY
        } else {
            self.ln_norm() - self.c0.norm().ln()
        }
    }
}

/// Complex division by Smith's algorithm: stays accurate when the naive
/// `conj * a / |b|^2` formula would overflow or underflow in `|b|^2`.
fn robust_div(a: Complex64, b: Complex64) -> Complex64 {
    if b.im.abs() <= b.re.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.im + b.re * r;
        Complex64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

/// Wedge of the stored representatives, `a0 b1 - a1 b0`.
pub fn wedge(a: &PPoint, b: &PPoint) -> Complex64 {
    a.c0 * b.c1 - a.c1 * b.c0
}

/// Normalized chordal distance `|a ∧ b| / (||a|| ||b||)`, at most 1.
pub fn chordal(a: &PPoint, b: &PPoint) -> f64 {
    let w = wedge(a, b).norm();
    let na = (a.c0.norm_sqr() + a.c1.norm_sqr()).sqrt();
    let nb = (b.c0.norm_sqr() + b.c1.norm_sqr()).sqrt();
    (w / (na * nb)).min(1.0)
}

/// ln chordal(a, b); -inf when the points coincide numerically.
pub fn ln_chordal(a: &PPoint, b: &PPoint) -> f64 {
    let w = wedge(a, b).norm();
    if w == 0.0 {
        return f64::NEG_INFINITY;
    }
    (w.ln() - a.ln_norm() - b.ln_norm()).min(0.0)
}
