//! Numeric projective roots of exact binary forms.
//!
//! Multiplicities are never inferred from floating clusters: the exact
//! squarefree strata fix them, and the numeric solver only ever runs on a
//! squarefree factor. Two-term strata (a z^k + b) bypass iteration entirely
//! and place k-th roots on a circle in closed form, which keeps degrees in
//! the tens of thousands cheap and accurate.

use crate::arch::point::PPoint;
use crate::error::Error;
use crate::exact::{BinaryForm, Rat, UniPoly, ZerosDivisor};
use crate::util::{ln_rat_abs, rat_to_f64};
use crate::Result;
use num::complex::Complex64;
use num::{Signed, Zero};

/// All projective roots of a form, with exact multiplicities.
#[derive(Clone, Debug)]
pub struct RootCloud {
    points: Vec<(PPoint, u32)>,
    pos_err: Vec<f64>,
    residual_bound: f64,
}

impl RootCloud {
    pub fn points(&self) -> &[(PPoint, u32)] {
        &self.points
    }

    /// Maximum normalized backward error of the numeric solve: each reported
    /// root is an exact root of a form whose coefficients are relatively
    /// perturbed by at most this amount.
    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    /// Position-error estimate for entry `i` (affine scale, not certified).
    pub fn pos_err(&self, i: usize) -> f64 {
        self.pos_err[i]
    }

    pub fn degree(&self) -> usize {
        self.points.iter().map(|(_, m)| *m as usize).sum()
    }

    /// Sum of multiplicity-weighted position errors; the generic first-order
    /// error term for any 1-Lipschitz functional summed over the cloud.
    pub fn position_error_sum(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.pos_err)
            .map(|((_, m), e)| *m as f64 * e)
            .sum()
    }
}

/// Solves for the projective roots of `form`, multiplicities taken from the
/// exact strata. Fails (with the best residual achieved) if the backward
/// error cannot be pushed below `tol`.
pub fn roots_complex(form: &BinaryForm, tol: f64) -> Result<RootCloud> {
    let divisor = ZerosDivisor::new(form.clone())?;
    roots_of_divisor(&divisor, tol)
}

/// Same as [`roots_complex`] but reuses an already-built divisor.
pub fn roots_of_divisor(divisor: &ZerosDivisor, tol: f64) -> Result<RootCloud> {
    let mut points = Vec::new();
    let mut pos_err = Vec::new();
    let mut residual: f64 = 0.0;
    for stratum in &divisor.strata().strata {
        let sols = solve_squarefree(&stratum.poly)?;
        for s in sols {
            points.push((PPoint::from_affine(s.z), stratum.mult));
            pos_err.push(s.pos_err);
            residual = residual.max(s.backward);
        }
    }
    if divisor.inf_mult() > 0 {
        points.push((PPoint::infinity(), divisor.inf_mult() as u32));
        pos_err.push(0.0);
    }
    if residual > tol {
        return Err(Error::Numeric(format!(
            "root solve stalled at backward error {residual:.3e} (tolerance {tol:.1e})"
        )));
    }
    Ok(RootCloud { points, pos_err, residual_bound: residual })
}

pub(crate) struct Solved {
    pub(crate) z: Complex64,
    pub(crate) pos_err: f64,
    pub(crate) backward: f64,
}

/// Roots of a monic squarefree rational polynomial.
fn solve_squarefree(q: &UniPoly) -> Result<Vec<Solved>> {
    let mut out = Vec::new();
    let mut q = q.clone();
    if q.ord_at_zero() > 0 {
        // Squarefree, so the factor z appears exactly once.
        out.push(Solved { z: Complex64::new(0.0, 0.0), pos_err: 0.0, backward: 0.0 });
        let mut coeffs = q.coeffs().to_vec();
        coeffs.remove(0);
        q = UniPoly::from_coeffs(coeffs);
    }
    let d = match q.degree() {
        None | Some(0) => return Ok(out),
        Some(d) => d,
    };
    if d == 1 {
        let z = -&q.coeff(0) / &q.coeff(1);
        let zf = rat_to_f64(&z);
        out.push(Solved {
            z: Complex64::new(zf, 0.0),
            pos_err: 2e-16 * (1.0 + zf.abs()),
            backward: f64::EPSILON,
        });
        return Ok(out);
    }
    if let Some(sols) = binomial_roots(&q) {
        out.extend(sols);
        return Ok(out);
    }
    let coeffs: Vec<Complex64> = q.coeffs().iter().map(rat_to_c64).collect();
    out.extend(aberth(&coeffs)?);
    Ok(out)
}

fn rat_to_c64(x: &Rat) -> Complex64 {
    Complex64::new(rat_to_f64(x), 0.0)
}

/// Closed form for `a z^k + b`: k-th roots of -b/a placed by angle.
/// Exact magnitudes via logs, so degrees like 2^16 stay accurate.
fn binomial_roots(q: &UniPoly) -> Option<Vec<Solved>> {
    let d = q.degree()?;
    if d < 2 {
        return None;
    }
    for k in 1..d {
        if !q.coeff(k).is_zero() {
            return None;
        }
    }
    let ratio = -&q.coeff(0) / &q.coeff(d);
    debug_assert!(!ratio.is_zero());
    let r = (ln_rat_abs(&ratio) / d as f64).exp();
    let base = if ratio.is_negative() { std::f64::consts::PI / d as f64 } else { 0.0 };
    let k = d as f64;
    // Constructed roots have relative error ~machine epsilon; a coefficient
    // perturbation of about d*eps makes them exact.
    let backward = 4e-16 * k;
    let pos_err = 4e-16 * (1.0 + r) * (1.0 + k.ln());
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let theta = base + 2.0 * std::f64::consts::PI * j as f64 / k;
        out.push(Solved {
            z: Complex64::from_polar(r, theta),
            pos_err,
            backward,
        });
    }
    Some(out)
}

/// Horner evaluation of p and p' at z.
fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Normalized backward error |p(z)| / sum_k |a_k||z|^k.
fn backward_error(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = eval_with_derivative(coeffs, z);
    let az = z.norm();
    let mut scale = 0.0;
    let mut zp = 1.0;
    for c in coeffs {
        scale += c.norm() * zp;
        zp *= az;
    }
    if scale == 0.0 {
        return 0.0;
    }
    p.norm() / scale
}

/// Simultaneous (Aberth–Ehrlich) iteration for a squarefree polynomial with
/// complex coefficients, low-to-high order. Also serves the preimage solves
/// in the sampling code, whose coefficients are genuinely complex.
pub(crate) fn aberth(coeffs: &[Complex64]) -> Result<Vec<Solved>> {
    let d = coeffs.len() - 1;
    debug_assert!(d >= 1 && coeffs[d].norm() > 0.0);
    if d == 1 {
        let z = -coeffs[0] / coeffs[1];
        return Ok(vec![Solved {
            z,
            pos_err: 2e-16 * (1.0 + z.norm()),
            backward: backward_error(coeffs, z),
        }]);
    }
    if d == 2 {
        return Ok(quadratic(coeffs));
    }

    // Circle seeding at the geometric-mean modulus, with an angular offset
    // so real-coefficient symmetry cannot trap the iteration.
    let lead = coeffs[d].norm();
    let tail = coeffs[0].norm();
    let r = if tail > 0.0 {
        (tail / lead).powf(1.0 / d as f64).clamp(1e-6, 1e6)
    } else {
        1.0
    };
    let mut z: Vec<Complex64> = (0..d)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.41;
            Complex64::from_polar(r.max(0.25), th)
        })
        .collect();

    let mut steps = vec![Complex64::new(0.0, 0.0); d];
    for _ in 0..400 {
        let mut done = true;
        for i in 0..d {
            let (p, dp) = eval_with_derivative(coeffs, z[i]);
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() < 1e-300 {
                        // Collision of iterates; nudge apart.
                        s += Complex64::new(1e150, 0.0);
                    } else {
                        s += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * s;
            let w = if denom.norm() > 1e-12 { newton / denom } else { newton };
            z[i] -= w;
            steps[i] = w;
            if w.norm() > 5e-15 * (1.0 + z[i].norm()) {
                done = false;
            }
        }
        if done {
            break;
        }
    }

    // Newton polish and per-root error estimates.
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let mut zi = z[i];
        let mut last = steps[i].norm();
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(coeffs, zi);
            if dp.norm() == 0.0 {
                break;
            }
            let w = p / dp;
            zi -= w;
            last = w.norm();
        }
        let (p, dp) = eval_with_derivative(coeffs, zi);
        let cond = if dp.norm() > 0.0 { p.norm() / dp.norm() } else { last };
        let pos_err = (2.0 * last).max(cond) + 4e-16 * (1.0 + zi.norm());
        out.push(Solved { z: zi, pos_err, backward: backward_error(coeffs, zi) });
    }
    Ok(out)
}

fn quadratic(coeffs: &[Complex64]) -> Vec<Solved> {
    let (c, b, a) = (coeffs[0], coeffs[1], coeffs[2]);
    let disc = (b * b - 4.0 * a * c).sqrt();
    // Pick the sign that avoids cancellation in -b -+ disc.
    let s = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
    let (z0, z1) = if s.norm() == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let q = -0.5 * s;
        (q / a, c / q)
    };
    [z0, z1]
        .into_iter()
        .map(|z| Solved {
            z,
            pos_err: 4e-16 * (1.0 + z.norm()) + backward_error(coeffs, z).sqrt() * (1.0 + z.norm()),
            backward: backward_error(coeffs, z),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::poly_i64;

    fn roots_of(coeffs: &[i64]) -> RootCloud {
        let p = poly_i64(coeffs);
        let form = BinaryForm::from_univariate(&p, p.degree().unwrap());
        roots_complex(&form, 1e-9).unwrap()
    }

    fn sorted_affine(c: &RootCloud) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = c
            .points()
            .iter()
            .filter(|(p, _)| !p.is_infinity())
            .map(|(p, _)| p.affine().unwrap())
            .collect();
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn plus_minus_one_from_quadratic() {
        let c = roots_of(&[-1, 0, 1]);
        let r = sorted_affine(&c);
        assert!((r[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn projective_roots_zero_one_infinity() {
        // p0^2 p1 - p1^2 p0 dehomogenizes to z - z^2; support {0, 1, inf}.
        let form = BinaryForm::new(
            3,
            vec![Rat::zero(), Rat::from_integer(1.into()), Rat::from_integer((-1).into()), Rat::zero()],
        );
        let c = roots_complex(&form, 1e-9).unwrap();
        assert_eq!(c.degree(), 3);
        assert_eq!(c.points().iter().filter(|(p, _)| p.is_infinity()).count(), 1);
        let finite = sorted_affine(&c);
        assert!(finite[0].norm() < 1e-14);
        assert!((finite[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn repeated_quadratic_keeps_exact_multiplicity() {
        // (z^2-2)^2: two double roots at +-sqrt2, solved on the squarefree stratum.
        let c = roots_of(&[4, 0, -4, 0, 1]);
        assert_eq!(c.degree(), 4);
        assert_eq!(c.points().len(), 2);
        for (p, m) in c.points() {
            assert_eq!(*m, 2);
            assert!((p.affine().unwrap().norm() - 2f64.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn binomial_fast_path_high_degree_roots_of_unity() {
        let mut coeffs = vec![0i64; 1025];
        coeffs[0] = -1;
        coeffs[1024] = 1;
        let c = roots_of(&coeffs);
        assert_eq!(c.degree(), 1024);
        assert!(c.residual_bound() < 1e-9);
        for (p, _) in c.points() {
            assert!((p.affine().unwrap().norm() - 1.0).abs() < 1e-13);
        }
        // Roots must be distinct and sum to ~0.
        let sum: Complex64 = c.points().iter().map(|(p, _)| p.affine().unwrap()).sum();
        assert!(sum.norm() < 1e-10);
    }

    #[test]
    fn binomial_negative_ratio_offsets_angles() {
        // z^4 + 1: primitive 8th roots of unity.
        let c = roots_of(&[1, 0, 0, 0, 1]);
        for (p, _) in c.points() {
            let z = p.affine().unwrap();
            assert!((z.norm() - 1.0).abs() < 1e-14);
            assert!((z.powi(4) + Complex64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn wilkinson_style_integer_roots() {
        // (z-1)(z-2)...(z-8) expanded; a classically ill-conditioned family,
        // still fine at this size.
        let mut p = poly_i64(&[1]);
        for k in 1..=8 {
            p = p.mul(&poly_i64(&[-k, 1]));
        }
        let form = BinaryForm::from_univariate(&p, 8);
        let c = roots_complex(&form, 1e-9).unwrap();
        let mut r = sorted_affine(&c);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (k, z) in r.iter().enumerate() {
            assert!((z - Complex64::new(k as f64 + 1.0, 0.0)).norm() < 1e-7, "root {k}: {z}");
        }
        assert!(c.residual_bound() < 1e-12);
    }

    #[test]
    fn mixed_strata_with_zero_root_and_multiplicity() {
        // z^2 (z^2 - 1) = z^4 - z^2: strata {z^2-1} mult 1... actually
        // Yun gives stratum z at multiplicity 2 and z^2-1 at 1.
        let c = roots_of(&[0, 0, -1, 0, 1]);
        assert_eq!(c.degree(), 4);
        let mut mults: Vec<u32> = c.points().iter().map(|(_, m)| *m).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 1, 2]);
    }

    #[test]
    fn dense_random_poly_backward_error_is_tiny() {
        let c = roots_of(&[7, -3, 0, 5, -9, 1, 2, -8, 1, 1, -4, 6]);
        assert_eq!(c.degree(), 11);
        assert!(c.residual_bound() < 1e-12, "residual {}", c.residual_bound());
    }

    #[test]
    fn unreachable_tolerance_reports_best_residual() {
        let p = poly_i64(&[7, -3, 0, 5, -9, 1, 2, -8, 1, 1, -4, 6]);
        let form = BinaryForm::from_univariate(&p, 11);
        let err = roots_complex(&form, 1e-30).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
        assert!(err.to_string().contains("backward error"));
    }
}
