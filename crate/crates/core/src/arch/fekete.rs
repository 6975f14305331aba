//! Weighted Mahler measures and Fekete sums over the complex place.
//!
//! Everything here consumes a numeric root cloud whose multiplicities are
//! exact, so the only error sources are root positions and weight
//! evaluations; both are tracked as first-order bounds.

use crate::arch::point::{self, PPoint};
use crate::arch::roots::{roots_of_divisor, RootCloud};
use crate::exact::{dstar_divisor, Rat, ZerosDivisor};
use crate::util::{ln_rat_abs, Kahan};
use crate::Result;
use num::Zero;

/// A continuous weight on the projective line. The smoothness data
/// (a Hölder pair `(1/kappa, C)`) is fitted by sampling, never assumed.
#[derive(Clone)]
pub struct WeightFn {
    label: String,
    eval: std::sync::Arc<dyn Fn(&PPoint) -> f64 + Sync + Send>,
    eval_err: f64,
    holder_exponent: f64,
    holder_constant: f64,
}

impl WeightFn {
    pub fn new(
        label: impl Into<String>,
        eval_err: f64,
        eval: impl Fn(&PPoint) -> f64 + Sync + Send + 'static,
    ) -> Self {
        WeightFn {
            label: label.into(),
            eval: std::sync::Arc::new(eval),
            eval_err,
            holder_exponent: 1.0,
            holder_constant: 0.0,
        }
    }

    /// The zero weight; potential theory with the bare chordal kernel.
    pub fn trivial() -> Self {
        let mut w = WeightFn::new("trivial", 0.0, |_| 0.0);
        w.holder_constant = 0.0;
        w
    }

    pub fn is_trivial(&self) -> bool {
        self.label == "trivial"
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, p: &PPoint) -> f64 {
        (self.eval)(p)
    }

    pub fn eval_err(&self) -> f64 {
        self.eval_err
    }

    /// `(1/kappa, C)`: empirical modulus-of-continuity data on the chordal
    /// metric, set by [`WeightFn::fit_holder`] or by a caller with better
    /// knowledge.
    pub fn holder(&self) -> (f64, f64) {
        (self.holder_exponent, self.holder_constant)
    }

    pub fn set_holder(&mut self, exponent: f64, constant: f64) {
        assert!(exponent > 0.0 && exponent <= 1.0);
        self.holder_exponent = exponent;
        self.holder_constant = constant;
    }

    /// Samples random chordal pairs and records the largest observed
    /// |g(x)-g(y)| / d(x,y)^exponent as the constant. An empirical bound:
    /// reported, not certified.
    pub fn fit_holder(&mut self, exponent: f64, seed: u64, samples: usize) {
        use rand::Rng;
        let mut rng = crate::util::substream(seed, 0x686f6c64, 0);
        let mut c: f64 = 0.0;
        for _ in 0..samples {
            let a = random_sphere_point(&mut rng);
            // Mix well-separated pairs with tight ones, where difference
            // quotients usually peak.
            let b = if rng.gen_bool(0.5) {
                random_sphere_point(&mut rng)
            } else {
                perturb(&a, 10f64.powf(rng.gen_range(-6.0..-1.0)), &mut rng)
            };
            let d = point::chordal(&a, &b);
            if d > 1e-12 {
                c = c.max((self.eval(&a) - self.eval(&b)).abs() / d.powf(exponent));
            }
        }
        self.holder_exponent = exponent;
        self.holder_constant = c;
    }
}

/// Uniform random point for the Fubini-Study area: a Gaussian pair in C^2
/// modulo scale.
pub(crate) fn random_sphere_point(rng: &mut impl rand::Rng) -> PPoint {
    let mut n = || -> f64 {
        let u: f64 = rng.gen_range(1e-12..1.0);
        let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        (-2.0 * u.ln()).sqrt() * v.cos()
    };
    let c0 = num::complex::Complex64::new(n(), n());
    let c1 = num::complex::Complex64::new(n(), n());
    PPoint::new(c0, c1).unwrap_or_else(|_| PPoint::zero())
}

/// Moves a point by roughly `scale` in chordal distance.
fn perturb(a: &PPoint, scale: f64, rng: &mut impl rand::Rng) -> PPoint {
    let mut d = || {
        num::complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
    };
    let (d0, d1) = (d(), d());
    PPoint::new(a.c0() + d0, a.c1() + d1).unwrap_or_else(|_| *a)
}

/// `log|L| + sum_j log||(1, z_j)||` over the finite roots; representatives
/// `(0,1)` at infinity contribute zero. Returns (value, error bound).
pub fn msharp_inf(z: &ZerosDivisor, cloud: &RootCloud) -> (f64, f64) {
    let mut acc = Kahan::new();
    if !z.lc().is_zero() {
        acc.add(ln_rat_abs(z.lc()));
    }
    for (p, m) in cloud.points() {
        if !p.is_infinity() {
            acc.add(*m as f64 * p.ln_norm_affine());
        }
    }
    // d(ln||(1,z)||)/dz has modulus |z|/(1+|z|^2) <= 1/2.
    let err = 0.5 * cloud.position_error_sum() + 1e-14 * cloud.degree() as f64;
    (acc.total(), err)
}

/// Weighted logarithmic Mahler measure: root-weight sum plus [`msharp_inf`].
pub fn mahler_g(z: &ZerosDivisor, cloud: &RootCloud, g: &WeightFn) -> (f64, f64) {
    let (msharp, mut err) = msharp_inf(z, cloud);
    let mut acc = Kahan::new();
    acc.add(msharp);
    if !g.is_trivial() {
        for (i, (p, m)) in cloud.points().iter().enumerate() {
            acc.add(*m as f64 * g.eval(p));
            let (expo, c) = g.holder();
            err += *m as f64 * (g.eval_err() + c * cloud.pos_err(i).powf(expo));
        }
    }
    (acc.total(), err)
}

/// Off-diagonal weighted Fekete sum over distinct support points:
/// `sum_{i != j} m_i m_j (ln chordal(z_i, z_j) - g(z_i) - g(z_j))`.
pub fn fekete_sum(cloud: &RootCloud, g: &WeightFn) -> (f64, f64) {
    let pts = cloud.points();
    let deg: f64 = cloud.degree() as f64;
    let mut acc = Kahan::new();
    let mut err = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let mm = (pts[i].1 as f64) * (pts[j].1 as f64);
            let d = point::chordal(&pts[i].0, &pts[j].0);
            acc.add(2.0 * mm * point::ln_chordal(&pts[i].0, &pts[j].0));
            if d > 0.0 {
                err += 2.0 * mm * (cloud.pos_err(i) + cloud.pos_err(j)) / d;
            }
        }
    }
    if !g.is_trivial() {
        let (expo, c) = g.holder();
        for (i, (p, m)) in pts.iter().enumerate() {
            let w = 2.0 * (*m as f64) * (deg - *m as f64);
            acc.add(-w * g.eval(p));
            err += w * (g.eval_err() + c * cloud.pos_err(i).powf(expo));
        }
    }
    (acc.total(), err)
}

/// Both sides of the strong diagonal identity at the complex place:
/// lhs = (Z,Z)_g + 2 sum_{w finite} m_w^2 ln chordal(w, inf)
///       - 2 sum_w m_w^2 g(w),
/// rhs = 2 (deg Z) ln|L| + ln|D*(Z)| - 2 (deg Z) M_g(P).
/// They agree exactly in exact arithmetic; the gap measures numeric error.
pub fn discrepancy_identity_check(z: &ZerosDivisor, g: &WeightFn) -> Result<(f64, f64)> {
    let cloud = roots_of_divisor(z, 1e-8)?;
    let inf = PPoint::infinity();
    let (fek, _) = fekete_sum(&cloud, g);

    let mut lhs = Kahan::new();
    lhs.add(fek);
    for (p, m) in cloud.points() {
        let m2 = (*m as f64) * (*m as f64);
        if !p.is_infinity() {
            lhs.add(2.0 * m2 * point::ln_chordal(p, &inf));
        }
        if !g.is_trivial() {
            lhs.add(-2.0 * m2 * g.eval(p));
        }
    }

    let deg = z.degree() as f64;
    let dstar = dstar_divisor(z);
    let (mah, _) = mahler_g(z, &cloud, g);
    let mut rhs = Kahan::new();
    if !z.lc().is_zero() {
        rhs.add(2.0 * deg * ln_rat_abs(z.lc()));
    }
    rhs.add(ln_rat_abs(&dstar));
    rhs.add(-2.0 * deg * mah);
    Ok((lhs.total(), rhs.total()))
}

/// Convenience: exact leading coefficient of the dehomogenized form as ln|L|.
pub fn ln_lead(z: &ZerosDivisor) -> f64 {
    ln_rat_abs(z.lc())
}

#[allow(unused)]
fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::poly_i64;
    use crate::exact::BinaryForm;

    const LN2: f64 = std::f64::consts::LN_2;

    fn divisor_of(coeffs: &[i64]) -> ZerosDivisor {
        ZerosDivisor::from_poly(&poly_i64(coeffs)).unwrap()
    }

    fn cloud_of(z: &ZerosDivisor) -> RootCloud {
        roots_of_divisor(z, 1e-9).unwrap()
    }

    /// Closed-form normalized escape weight for the squaring map.
    fn g_square() -> WeightFn {
        WeightFn::new("g-square-closed-form", 1e-15, |p: &PPoint| {
            p.c0().norm().max(p.c1().norm()).ln() - p.ln_norm()
        })
    }

    #[test]
    fn msharp_of_plus_minus_one_is_ln2() {
        let z = divisor_of(&[-1, 0, 1]);
        let (v, e) = msharp_inf(&z, &cloud_of(&z));
        assert!((v - LN2).abs() < 1e-12, "{v} vs {LN2}, err {e}");
    }

    #[test]
    fn msharp_of_zero_infinity_divisor_is_zero() {
        // p0 p1: dehomogenized z, roots {0, inf}.
        let form = BinaryForm::new(2, vec![Rat::zero(), rat(1, 1), Rat::zero()]);
        let z = ZerosDivisor::new(form).unwrap();
        let (v, _) = msharp_inf(&z, &cloud_of(&z));
        assert!(v.abs() < 1e-14);
        // 2 p0 p1 shifts it by ln 2.
        let form2 = BinaryForm::new(2, vec![Rat::zero(), rat(2, 1), Rat::zero()]);
        let z2 = ZerosDivisor::new(form2).unwrap();
        let (v2, _) = msharp_inf(&z2, &cloud_of(&z2));
        assert!((v2 - LN2).abs() < 1e-14);
    }

    #[test]
    fn mahler_with_square_weight_kills_unit_roots() {
        // P = z^2 - 1 under the squaring weight: ln2 + 2*(-ln2/2) = 0.
        let z = divisor_of(&[-1, 0, 1]);
        let (v, _) = mahler_g(&z, &cloud_of(&z), &g_square());
        assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn mahler_of_point_divisor_at_two() {
        // (p0,p1) wedge (1,2) = 2 p0 - p1: root z = 2.
        let form = BinaryForm::new(1, vec![rat(2, 1), rat(-1, 1)]);
        let z = ZerosDivisor::new(form).unwrap();
        let (v, _) = mahler_g(&z, &cloud_of(&z), &WeightFn::trivial());
        assert!((v - 5f64.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn fekete_sum_of_cube_roots() {
        // div(z^3 - z): pairwise chordal 1/sqrt2, 1/sqrt2, 1.
        let z = divisor_of(&[0, -1, 0, 1]);
        let (v, _) = fekete_sum(&cloud_of(&z), &WeightFn::trivial());
        assert!((v + 2.0 * LN2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn fekete_sum_single_point_is_empty() {
        let form = BinaryForm::new(2, vec![rat(1, 1), rat(-2, 1), rat(1, 1)]);
        // (z-1)^2: one support point.
        let z = ZerosDivisor::new(form).unwrap();
        let (v, _) = fekete_sum(&cloud_of(&z), &WeightFn::trivial());
        assert_eq!(v, 0.0);
    }

    #[test]
    fn strong_identity_hand_value() {
        let z = divisor_of(&[-1, 0, 1]);
        let (lhs, rhs) = discrepancy_identity_check(&z, &WeightFn::trivial()).unwrap();
        assert!((lhs + 2.0 * LN2).abs() < 1e-12, "lhs {lhs}");
        assert!((rhs + 2.0 * LN2).abs() < 1e-12, "rhs {rhs}");
    }

    #[test]
    fn strong_identity_with_infinity_in_support() {
        // p0 p1 (p0 - p1): support {0, 1, inf}; both sides equal -3 ln2.
        let form = BinaryForm::new(
            3,
            vec![Rat::zero(), rat(1, 1), rat(-1, 1), Rat::zero()],
        );
        let z = ZerosDivisor::new(form).unwrap();
        let (lhs, rhs) = discrepancy_identity_check(&z, &WeightFn::trivial()).unwrap();
        assert!((lhs + 3.0 * LN2).abs() < 1e-12, "lhs {lhs}");
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn strong_identity_point_divisor() {
        let form = BinaryForm::new(1, vec![rat(2, 1), rat(-1, 1)]);
        let z = ZerosDivisor::new(form).unwrap();
        let (lhs, rhs) = discrepancy_identity_check(&z, &WeightFn::trivial()).unwrap();
        // deg 1: Fekete empty, lhs = 2 ln[2, inf] = 2 ln(2/sqrt5)... wedge of
        // (1,2),(0,1) is 1, so [2,inf] = 1/sqrt5 and lhs = -ln5.
        assert!((lhs + 5f64.ln()).abs() < 1e-12, "lhs {lhs}");
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn strong_identity_with_green_weight_and_multiplicities() {
        let z = divisor_of(&[4, 0, -4, 0, 1]); // (z^2-2)^2
        let (lhs, rhs) = discrepancy_identity_check(&z, &g_square()).unwrap();
        assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn strong_identity_random_corpus() {
        use rand::Rng;
        let mut rng = crate::util::substream(42, 0x6c656d35, 2);
        let mut checked = 0;
        for _ in 0..60 {
            let d = rng.gen_range(2..=6);
            let coeffs: Vec<i64> = (0..=d).map(|_| rng.gen_range(-10..=10)).collect();
            let p = poly_i64(&coeffs);
            if p.degree().map_or(0, |x| x) < 2 {
                continue;
            }
            let z = match ZerosDivisor::from_poly(&p) {
                Ok(z) => z,
                Err(_) => continue,
            };
            let (lhs, rhs) = match discrepancy_identity_check(&z, &WeightFn::trivial()) {
                Ok(v) => v,
                Err(_) => continue,
            };
            assert!(
                (lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()),
                "coeffs {coeffs:?}: {lhs} vs {rhs}"
            );
            checked += 1;
        }
        assert!(checked >= 40, "only {checked} divisors checked");
    }

    #[test]
    fn holder_fit_of_coordinate_function_is_order_one() {
        let mut w = WeightFn::new("re-chart", 0.0, |p: &PPoint| {
            (p.c1() * p.c0().conj()).re / (p.c0().norm_sqr() + p.c1().norm_sqr())
        });
        w.fit_holder(1.0, 9, 4000);
        let (_, c) = w.holder();
        assert!(c > 0.5 && c < 4.0, "fitted Lipschitz constant {c}");
    }
}
