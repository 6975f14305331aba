//! Homogeneous binary forms over Q and lifts of rational self-maps of the
//! projective line.
//!
//! A form of degree `d` is stored as the coefficient vector of
//! `sum_k c_k p0^{d-k} p1^k`, which makes dehomogenization to `P(1, z)`
//! a reslice: the same vector read as a univariate polynomial in `z`.
//! The point at infinity is `(0 : 1)`, so its multiplicity in a divisor is
//! the `p0`-multiplicity of the form, i.e. `d - deg P(1, z)`.

use super::poly::{pow_rat, Rat, UniPoly};
use crate::error::Error;
use crate::Result;
use num::{BigInt, One, Zero};

/// Homogeneous form of exact formal degree `deg`. The zero form of a given
/// degree is representable (it shows up as one component of a constant map's
/// lift); divisor constructors reject it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryForm {
    deg: usize,
    coeffs: Vec<Rat>, // coeffs[k] multiplies p0^{deg-k} p1^k
}

impl BinaryForm {
    pub fn new(deg: usize, coeffs: Vec<Rat>) -> Self {
        assert_eq!(coeffs.len(), deg + 1, "coefficient count must be deg + 1");
        BinaryForm { deg, coeffs }
    }

    pub fn zero(deg: usize) -> Self {
        BinaryForm {
            deg,
            coeffs: vec![Rat::zero(); deg + 1],
        }
    }

    /// Homogenize `p` to exact degree `deg >= deg p`; the slack goes into
    /// powers of `p0`, i.e. roots at infinity.
    pub fn from_univariate(p: &UniPoly, deg: usize) -> Self {
        let pd = p.degree().map_or(0, |d| d);
        assert!(deg >= pd, "target degree below polynomial degree");
        let mut coeffs = vec![Rat::zero(); deg + 1];
        for (k, c) in p.coeffs().iter().enumerate() {
            coeffs[k] = c.clone();
        }
        BinaryForm { deg, coeffs }
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `P(1, z)` as a univariate polynomial; zero for the zero form.
    pub fn dehomogenize(&self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.clone())
    }

    /// Multiplicity of the root at infinity, `deg - deg P(1, z)`.
    pub fn inf_mult(&self) -> usize {
        assert!(!self.is_zero(), "infinity multiplicity of the zero form");
        self.deg - self.dehomogenize().degree().unwrap()
    }

    pub fn eval(&self, p0: &Rat, p1: &Rat) -> Rat {
        let mut acc = Rat::zero();
        // Horner in p1/p0 would divide; evaluate with explicit powers instead,
        // skipping zero coefficients (forms in the dynamical families are sparse).
        let mut pow0 = vec![Rat::one()];
        let mut pow1 = vec![Rat::one()];
        for k in 1..=self.deg {
            pow0.push(&pow0[k - 1] * p0);
            pow1.push(&pow1[k - 1] * p1);
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc += c * &pow0[self.deg - k] * &pow1[k];
        }
        acc
    }

    pub fn add(&self, other: &BinaryForm) -> BinaryForm {
        assert_eq!(self.deg, other.deg);
        BinaryForm {
            deg: self.deg,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &BinaryForm) -> BinaryForm {
        assert_eq!(self.deg, other.deg);
        BinaryForm {
            deg: self.deg,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> BinaryForm {
        BinaryForm {
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &BinaryForm) -> BinaryForm {
        let deg = self.deg + other.deg;
        let mut coeffs = vec![Rat::zero(); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        BinaryForm { deg, coeffs }
    }

    pub fn pow(&self, e: u32) -> BinaryForm {
        let mut acc = BinaryForm::new(0, vec![Rat::one()]);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn digits_estimate(&self) -> u64 {
        self.coeffs.iter().map(crate::util::rat_digits).sum()
    }
}

/// Wedge of two pairs of forms: `(A0, A1) ^ (B0, B1) = A0 B1 - A1 B0`.
/// For lifts this cuts out the divisor where the two maps agree.
pub fn wedge_pairs(a: (&BinaryForm, &BinaryForm), b: (&BinaryForm, &BinaryForm)) -> BinaryForm {
    a.0.mul(b.1).sub(&a.1.mul(b.0))
}

/// Homogeneous resultant of a pair of degree-`d` forms: the determinant of
/// the `2d x 2d` Sylvester matrix of the full (formal-degree) coefficient
/// vectors. For `d = 0` the convention is 1 unless both constants vanish.
pub fn resultant_pair(f0: &BinaryForm, f1: &BinaryForm) -> Rat {
    assert_eq!(f0.deg(), f1.deg());
    let d = f0.deg();
    if d == 0 {
        return if f0.is_zero() && f1.is_zero() {
            Rat::zero()
        } else {
            Rat::one()
        };
    }
    let size = 2 * d;
    let mut mat = vec![vec![Rat::zero(); size]; size];
    for i in 0..d {
        for k in 0..=d {
            // Row of F0 coefficients, highest z-power first.
            mat[i][i + k] = f0.coeffs[d - k].clone();
            mat[d + i][i + k] = f1.coeffs[d - k].clone();
        }
    }
    gaussian_det(mat)
}

fn gaussian_det(mut mat: Vec<Vec<Rat>>) -> Rat {
    let n = mat.len();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| !mat[r][col].is_zero()) else {
            return Rat::zero();
        };
        if pr != col {
            mat.swap(pr, col);
            det = -det;
        }
        let pv = mat[col][col].clone();
        det *= &pv;
        let (top, rest) = mat.split_at_mut(col + 1);
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pv;
            for c in col..n {
                let t = &factor * &top[col][c];
                row[c] -= t;
            }
        }
    }
    det
}

/// Growth guard for iterated composition: a cap on the total decimal-digit
/// footprint of a lift's coefficients.
#[derive(Clone, Copy, Debug)]
pub struct CoeffBudget {
    pub max_total_digits: u64,
}

impl Default for CoeffBudget {
    fn default() -> Self {
        CoeffBudget {
            max_total_digits: 10_000_000,
        }
    }
}

impl CoeffBudget {
    pub fn check(&self, digits: u64) -> Result<()> {
        if digits > self.max_total_digits {
            Err(Error::BudgetExceeded {
                digits,
                budget: self.max_total_digits,
            })
        } else {
            Ok(())
        }
    }
}

/// Homogeneous lift `F = (F0, F1)` of a rational self-map, with its exact
/// resultant. `Res F != 0` certifies that `F0, F1` share no projective zero,
/// so the pair genuinely represents a degree-`d` morphism.
#[derive(Clone, Debug)]
pub struct MapLift {
    f0: BinaryForm,
    f1: BinaryForm,
    res: Rat,
}

impl MapLift {
    pub fn new(f0: BinaryForm, f1: BinaryForm) -> Result<Self> {
        if f0.deg() != f1.deg() {
            return Err(Error::degenerate("lift components must share a degree"));
        }
        let res = resultant_pair(&f0, &f1);
        if res.is_zero() {
            return Err(Error::degenerate(
                "resultant vanishes: the pair has a common projective zero",
            ));
        }
        Ok(MapLift { f0, f1, res })
    }

    /// The identity map `(p0, p1)`.
    pub fn identity() -> Self {
        let f0 = BinaryForm::new(1, vec![Rat::one(), Rat::zero()]);
        let f1 = BinaryForm::new(1, vec![Rat::zero(), Rat::one()]);
        MapLift::new(f0, f1).expect("identity lift")
    }

    /// The constant map to the finite rational point `c`, lifted as `(1, c)`.
    pub fn constant(c: Rat) -> Self {
        let f0 = BinaryForm::new(0, vec![Rat::one()]);
        let f1 = BinaryForm::new(0, vec![c]);
        MapLift::new(f0, f1).expect("constant lift")
    }

    pub fn f0(&self) -> &BinaryForm {
        &self.f0
    }

    pub fn f1(&self) -> &BinaryForm {
        &self.f1
    }

    pub fn deg(&self) -> usize {
        self.f0.deg()
    }

    pub fn resultant(&self) -> &Rat {
        &self.res
    }

    pub fn coeffs(&self) -> impl Iterator<Item = &Rat> {
        self.f0.coeffs().iter().chain(self.f1.coeffs().iter())
    }

    /// Exact image of a rational projective point, returned in coprime
    /// integer coordinates. The nonzero resultant guarantees the image of a
    /// nonzero pair is nonzero.
    pub fn apply_point(&self, x0: &BigInt, x1: &BigInt) -> Result<(BigInt, BigInt)> {
        if x0.is_zero() && x1.is_zero() {
            return Err(Error::degenerate("the zero pair is not a projective point"));
        }
        let (a0, a1) = (
            Rat::from_integer(x0.clone()),
            Rat::from_integer(x1.clone()),
        );
        let (r0, r1) = (self.f0.eval(&a0, &a1), self.f1.eval(&a0, &a1));
        if r0.is_zero() && r1.is_zero() {
            return Err(Error::degenerate("map sent a point to the zero pair"));
        }
        let den = num::integer::lcm(r0.denom().clone(), r1.denom().clone());
        let mut y0 = r0.numer() * (&den / r0.denom());
        let mut y1 = r1.numer() * (&den / r1.denom());
        let g = num::integer::gcd(y0.clone(), y1.clone());
        if !g.is_zero() && !g.is_one() {
            y0 /= &g;
            y1 /= &g;
        }
        Ok((y0, y1))
    }

    pub fn digits_estimate(&self) -> u64 {
        self.f0.digits_estimate() + self.f1.digits_estimate()
    }

    /// `self` after `other`: `(self o other)(p) = self(other(p))`.
    ///
    /// The resultant comes from the composition rule
    /// `Res(F o G) = Res(F)^{deg G} * Res(G)^{(deg F)^2}` rather than a
    /// determinant of the composed (potentially huge) forms; the rule is
    /// cross-checked against the Sylvester determinant in tests.
    pub fn compose(&self, other: &MapLift, budget: &CoeffBudget) -> Result<MapLift> {
        let d = self.deg();
        let e = other.deg();
        // Estimated output footprint before doing the work: inputs scale
        // roughly multiplicatively.
        budget.check(self.digits_estimate().saturating_mul(e.max(1) as u64)
            + other.digits_estimate().saturating_mul(d.max(1) as u64))?;
        let g0 = &other.f0;
        let g1 = &other.f1;
        let mut pow0: Vec<BinaryForm> = vec![BinaryForm::new(0, vec![Rat::one()])];
        let mut pow1 = pow0.clone();
        for k in 1..=d {
            pow0.push(pow0[k - 1].mul(g0));
            pow1.push(pow1[k - 1].mul(g1));
        }
        let subst = |f: &BinaryForm| -> BinaryForm {
            let mut acc = BinaryForm::zero(d * e);
            for (k, c) in f.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                acc = acc.add(&pow0[d - k].mul(&pow1[k]).scale(c));
            }
            acc
        };
        let h0 = subst(&self.f0);
        let h1 = subst(&self.f1);
        budget.check(h0.digits_estimate() + h1.digits_estimate())?;
        let res = compose_resultant(&self.res, &other.res, d, e, budget)?;
        Ok(MapLift {
            f0: h0,
            f1: h1,
            res,
        })
    }

    /// n-fold iterate. `n = 0` is the identity.
    pub fn iterate(&self, n: u32, budget: &CoeffBudget) -> Result<MapLift> {
        let mut acc = MapLift::identity();
        for _ in 0..n {
            acc = self.compose(&acc, budget)?;
        }
        Ok(acc)
    }
}

fn compose_resultant(rf: &Rat, rg: &Rat, d: usize, e: usize, budget: &CoeffBudget) -> Result<Rat> {
    // Res(F)^e * Res(G)^{d^2}; guard the exponentiation since e = deg G grows
    // like d^n along iteration.
    let digits = crate::util::rat_digits(rf).saturating_mul(e as u64)
        + crate::util::rat_digits(rg).saturating_mul((d * d) as u64);
    budget.check(digits)?;
    let e32 = u32::try_from(e).map_err(|_| Error::unsupported("composition degree too large"))?;
    Ok(pow_rat(rf, e32) * pow_rat(rg, (d * d) as u32))
}

/// Lift of `z -> z^d + lower order terms` given by the dehomogenized
/// polynomial `f`: `(p0^d, F1)` with `F1` the homogenization of `f`.
pub fn lift_from_poly(f: &UniPoly) -> Result<MapLift> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Ok(MapLift::constant(f.coeff(0)));
    }
    let f1 = BinaryForm::from_univariate(f, d);
    let mut c0 = vec![Rat::zero(); d + 1];
    c0[0] = Rat::one();
    let f0 = BinaryForm::new(d, c0);
    MapLift::new(f0, f1)
}

/// The form cutting out `[f^n = a]`, i.e. the wedge `F^n ^ A`, with its
/// degree `d^n + deg a`. Fails if `f^n` and `a` agree identically.
pub fn divisor_fn_eq_a(
    f: &MapLift,
    a: &MapLift,
    n: u32,
    budget: &CoeffBudget,
) -> Result<BinaryForm> {
    let fn_lift = f.iterate(n, budget)?;
    let w = wedge_pairs((fn_lift.f0(), fn_lift.f1()), (a.f0(), a.f1()));
    if w.is_zero() {
        return Err(Error::degenerate("f^n coincides with a; the divisor is undefined"));
    }
    budget.check(w.digits_estimate())?;
    Ok(w)
}

/// Integer-content normalization of a lift: scale both components by the
/// same rational so all coefficients are integers with overall content 1.
/// This is the normalization under which Gauss norms read off local sizes.
pub fn normalize_content(f: &MapLift) -> MapLift {
    let mut den = BigInt::one();
    for c in f.coeffs() {
        den = num::integer::lcm(den, c.denom().clone());
    }
    let mut gcd = BigInt::zero();
    for c in f.coeffs() {
        let int = c.numer() * (&den / c.denom());
        gcd = num::integer::gcd(gcd, int);
    }
    if gcd.is_zero() {
        return f.clone();
    }
    let scale = Rat::new(den, gcd);
    let f0 = f.f0.scale(&scale);
    let f1 = f.f1.scale(&scale);
    let d = f.deg();
    let res = f.res.clone() * pow_rat(&scale, 2 * d as u32);
    MapLift { f0, f1, res }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::poly_i64;

    fn rat(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn lift_zsq() -> MapLift {
        lift_from_poly(&poly_i64(&[0, 0, 1])).unwrap()
    }

    #[test]
    fn frozen_resultants() {
        // (p0^2, p1^2): Res = 1
        assert!(lift_zsq().resultant().is_one());
        // (4 p0^2, p1^2): Res = 16
        let f0 = BinaryForm::new(2, vec![rat(4), rat(0), rat(0)]);
        let f1 = BinaryForm::new(2, vec![rat(0), rat(0), rat(1)]);
        assert_eq!(MapLift::new(f0, f1).unwrap().resultant(), &rat(16));
        // Lift of z^2 - 2 has unit resultant: good reduction everywhere.
        let l = lift_from_poly(&poly_i64(&[-2, 0, 1])).unwrap();
        assert_eq!(l.resultant().clone(), rat(1));
        // Lift of z^2 - 1/2 cleared to integer coefficients: (2 p0^2, 2 p1^2 - p0^2).
        let f0 = BinaryForm::new(2, vec![rat(2), rat(0), rat(0)]);
        let f1 = BinaryForm::new(2, vec![rat(-1), rat(0), rat(2)]);
        assert_eq!(MapLift::new(f0, f1).unwrap().resultant(), &rat(16));
    }

    #[test]
    fn composition_rule_matches_sylvester() {
        // Dense degree-2 map composed with itself; the composed resultant from
        // the composition rule must equal the direct 8x8 determinant.
        let f0 = BinaryForm::new(2, vec![rat(1), rat(0), rat(1)]); // p0^2 + p1^2
        let f1 = BinaryForm::new(2, vec![rat(0), rat(2), rat(-1)]); // 2 p0 p1 - p1^2
        let f = MapLift::new(f0, f1).unwrap();
        let budget = CoeffBudget::default();
        let f2 = f.compose(&f, &budget).unwrap();
        assert_eq!(f2.resultant().clone(), resultant_pair(f2.f0(), f2.f1()));

        // Cross-degree check: degree 2 after degree 3.
        let g = lift_from_poly(&poly_i64(&[0, -1, 0, 1])).unwrap(); // z^3 - z
        let fg = f.compose(&g, &budget).unwrap();
        assert_eq!(fg.resultant().clone(), resultant_pair(fg.f0(), fg.f1()));
    }

    #[test]
    fn iterate_monomial_map() {
        let f = lift_zsq();
        let f3 = f.iterate(3, &CoeffBudget::default()).unwrap();
        assert_eq!(f3.deg(), 8);
        assert!(f3.resultant().is_one());
        assert_eq!(f3.f1().dehomogenize(), poly_i64(&[0, 0, 0, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn budget_stops_runaway_iteration() {
        let f = lift_from_poly(&poly_i64(&[-2, 0, 1])).unwrap();
        let tight = CoeffBudget { max_total_digits: 50 };
        let err = f.iterate(6, &tight).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn wedge_of_equal_maps_is_zero() {
        let f = lift_zsq();
        let w = wedge_pairs((f.f0(), f.f1()), (f.f0(), f.f1()));
        assert!(w.is_zero());
        let err = divisor_fn_eq_a(&f, &f.iterate(1, &CoeffBudget::default()).unwrap(), 1, &CoeffBudget::default());
        assert!(err.is_err());
    }

    #[test]
    fn periodic_divisor_shape() {
        // [z^2 = Id]: wedge p0^2 p1 - p1^2 p0, degree 3, infinity multiplicity 1.
        let w = divisor_fn_eq_a(&lift_zsq(), &MapLift::identity(), 1, &CoeffBudget::default()).unwrap();
        assert_eq!(w.deg(), 3);
        assert_eq!(w.inf_mult(), 1);
        assert_eq!(w.dehomogenize(), poly_i64(&[0, 1, -1]));
    }

    #[test]
    fn content_normalization() {
        let f0 = BinaryForm::new(1, vec![Rat::new(2.into(), 3.into()), rat(4)]);
        let f1 = BinaryForm::new(1, vec![rat(0), rat(2)]);
        let f = MapLift::new(f0, f1).unwrap();
        let g = normalize_content(&f);
        let coeffs: Vec<Rat> = g.coeffs().cloned().collect();
        assert!(coeffs.iter().all(|c| c.denom().is_one()));
        assert_eq!(coeffs[0], rat(1)); // 2/3 scaled by 3/2
        assert_eq!(g.resultant().clone(), resultant_pair(g.f0(), g.f1()));
    }
}
