//! Dense univariate polynomials over arbitrary-precision rationals.
//!
//! Coefficients are stored low-to-high with no trailing zeros, so the vector
//! length determines the exact degree. Multiplication and division skip zero
//! coefficients; the scan polynomials of dynamical divisors (z^N - z and
//! friends) are sparse, and the skip keeps gcd chains on them cheap without
//! a dedicated sparse representation.

use crate::error::Error;
use crate::Result;
use num::{BigRational, One, Zero};

pub type Rat = BigRational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            UniPoly::zero()
        } else {
            UniPoly { coeffs: vec![c] }
        }
    }

    /// c * z^k
    pub fn monomial(c: Rat, k: usize) -> Self {
        if c.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    /// Build from low-to-high coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Leading coefficient; panics on the zero polynomial.
    pub fn lc(&self) -> &Rat {
        self.coeffs.last().expect("leading coefficient of zero polynomial")
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    /// Multiplicity of the root 0, i.e. the number of leading zero coefficients.
    pub fn ord_at_zero(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rat::from_integer(k.into()))
            .collect();
        UniPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
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
        UniPoly::from_coeffs(coeffs)
    }

    pub fn pow(&self, mut e: u32) -> UniPoly {
        let mut base = self.clone();
        let mut acc = UniPoly::one();
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

    /// Long division; panics if `div` is zero. Only the divisor's nonzero
    /// coefficients are touched per step, so sparse divisors stay cheap.
    pub fn divrem(&self, div: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let nonzero: Vec<usize> = (0..dd).filter(|&k| !div.coeffs[k].is_zero()).collect();
        let lc_inv = Rat::one() / div.lc().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            if rem[i + dd].is_zero() {
                continue;
            }
            let q = &rem[i + dd] * &lc_inv;
            rem[i + dd] = Rat::zero();
            for &k in &nonzero {
                let t = &q * &div.coeffs[k];
                rem[i + k] -= t;
            }
            quot[i] = q;
        }
        (UniPoly::from_coeffs(quot), UniPoly::from_coeffs(rem))
    }

    pub fn div_exact(&self, div: &UniPoly) -> UniPoly {
        let (q, r) = self.divrem(div);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic rescaling together with the leading coefficient that was divided out.
    pub fn monic(&self) -> (UniPoly, Rat) {
        assert!(!self.is_zero());
        let lc = self.lc().clone();
        if lc.is_one() {
            return (self.clone(), lc);
        }
        (self.scale(&(Rat::one() / &lc)), lc)
    }

    /// Monic gcd via the Euclidean remainder sequence, remainders monicized
    /// each step to control coefficient growth.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        if a.is_zero() {
            return if b.is_zero() { b } else { b.monic().0 };
        }
        if b.is_zero() {
            return a.monic().0;
        }
        if a.coeffs.len() < b.coeffs.len() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let (_, r) = a.divrem(&b);
            if r.is_zero() {
                return b.monic().0;
            }
            a = b;
            b = r.monic().0;
        }
    }

    /// Rough decimal-digit footprint, used by iteration budgets.
    pub fn digits_estimate(&self) -> u64 {
        self.coeffs.iter().map(crate::util::rat_digits).sum()
    }
}

/// Yun squarefree decomposition over Q.
///
/// Returns `(content, strata)` with `content * prod q_m^m == p`, each `q_m`
/// monic, squarefree, pairwise coprime, and `m` the exact multiplicity of the
/// roots of `q_m` in `p`. Constants yield an empty stratum list.
pub fn squarefree_strata(p: &UniPoly) -> Result<(Rat, Vec<(UniPoly, u32)>)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (pm, content) = p.monic();
    if pm.degree() == Some(0) {
        return Ok((content, Vec::new()));
    }
    let dp = pm.derivative();
    let a0 = pm.gcd(&dp);
    if a0.degree() == Some(0) {
        return Ok((content, vec![(pm, 1)]));
    }
    let mut strata = Vec::new();
    let mut b = pm.div_exact(&a0);
    let mut c = dp.div_exact(&a0);
    let mut d = c.sub(&b.derivative());
    let mut m = 1u32;
    while b.degree() > Some(0) {
        let q = b.gcd(&d);
        if q.degree() > Some(0) {
            strata.push((q.clone(), m));
        }
        b = b.div_exact(&q);
        c = d.div_exact(&q);
        d = c.sub(&b.derivative());
        m += 1;
    }
    Ok((content, strata))
}

/// Resultant of two univariate polynomials over Q in the convention
/// `Res(p, q) = lc(p)^{deg q} * prod q(alpha)` over the roots of `p`.
///
/// Constants follow `Res(p, c) = c^{deg p}` and `Res(c, q) = c^{deg q}`;
/// a zero argument gives 0 against anything of positive degree and 1
/// against a nonzero constant.
pub fn resultant_uni(p: &UniPoly, q: &UniPoly) -> Rat {
    let mut f = p.clone();
    let mut g = q.clone();
    let mut acc = Rat::one();
    loop {
        if f.is_zero() {
            return if g.degree() == Some(0) { acc } else { Rat::zero() };
        }
        if g.is_zero() {
            return if f.degree() == Some(0) { acc } else { Rat::zero() };
        }
        let (df, dg) = (f.degree().unwrap(), g.degree().unwrap());
        if df == 0 {
            return acc * pow_rat(f.lc(), dg as u32);
        }
        if dg == 0 {
            return acc * pow_rat(g.lc(), df as u32);
        }
        if df < dg {
            if (df * dg) % 2 == 1 {
                acc = -acc;
            }
            std::mem::swap(&mut f, &mut g);
            continue;
        }
        let (_, r) = f.divrem(&g);
        let dr = r.degree();
        // Res(f, g) = (-1)^{df dg} lc(g)^{df - deg r} Res(g, r)
        if (df * dg) % 2 == 1 {
            acc = -acc;
        }
        let drop = df - dr.map_or(0, |d| d);
        acc = acc * pow_rat(g.lc(), drop as u32);
        if r.is_zero() {
            return Rat::zero();
        }
        f = g;
        g = r;
    }
}

pub(crate) fn pow_rat(base: &Rat, mut e: u32) -> Rat {
    let mut b = base.clone();
    let mut acc = Rat::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Signed power with negative exponents allowed (base must be nonzero).
pub(crate) fn pow_rat_i64(base: &Rat, e: i64) -> Rat {
    if e >= 0 {
        pow_rat(base, e as u32)
    } else {
        assert!(!base.is_zero());
        Rat::one() / pow_rat(base, (-e) as u32)
    }
}

/// Convenience constructor from small integer coefficients, low to high.
pub fn poly_i64(coeffs: &[i64]) -> UniPoly {
    UniPoly::from_coeffs(coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect())
}

#[allow(unused)]
fn assert_sign_consistency(p: &UniPoly) {
    debug_assert!(p.coeffs.last().map_or(true, |c| !c.is_zero()));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> UniPoly {
        poly_i64(&[0, 1])
    }

    #[test]
    fn arithmetic_round_trip() {
        let p = poly_i64(&[4, 0, -4, 0, 1]); // z^4 - 4z^2 + 4
        let q = poly_i64(&[-2, 0, 1]); // z^2 - 2
        assert_eq!(q.mul(&q), p);
        let (quot, rem) = p.divrem(&q);
        assert_eq!(quot, q);
        assert!(rem.is_zero());
    }

    #[test]
    fn division_on_sparse_scan_polynomials() {
        // z^1024 - z divided by its derivative leaves a degree-1 remainder;
        // both steps must stay sparse.
        let n = 1024usize;
        let p = UniPoly::monomial(Rat::one(), n).sub(&z());
        let dp = p.derivative();
        let (_, r) = p.divrem(&dp);
        assert_eq!(r.degree(), Some(1));
        assert_eq!(p.gcd(&dp).degree(), Some(0));
    }

    #[test]
    fn yun_separates_multiplicities() {
        // (z^2 - 2)^2: one stratum at multiplicity 2.
        let q = poly_i64(&[-2, 0, 1]);
        let p = q.pow(2);
        let (content, strata) = squarefree_strata(&p).unwrap();
        assert!(content.is_one());
        assert_eq!(strata.len(), 1);
        assert_eq!(strata[0].0, q);
        assert_eq!(strata[0].1, 2);

        // 3*(z-1)(z-2)^2: two strata, content 3.
        let p2 = poly_i64(&[-1, 1]).mul(&poly_i64(&[-2, 1]).pow(2)).scale(&Rat::from_integer(3.into()));
        let (c2, s2) = squarefree_strata(&p2).unwrap();
        assert_eq!(c2, Rat::from_integer(3.into()));
        assert_eq!(s2.len(), 2);
        assert_eq!(s2[0], (poly_i64(&[-1, 1]), 1));
        assert_eq!(s2[1], (poly_i64(&[-2, 1]), 2));
    }

    #[test]
    fn yun_on_constants_and_linears() {
        let (c, s) = squarefree_strata(&poly_i64(&[7])).unwrap();
        assert_eq!(c, Rat::from_integer(7.into()));
        assert!(s.is_empty());
        let (c, s) = squarefree_strata(&poly_i64(&[3, 6])).unwrap();
        assert_eq!(c, Rat::from_integer(6.into()));
        assert_eq!(s, vec![(poly_i64(&[1, 2]).monic().0, 1)]);
    }

    #[test]
    fn resultant_frozen_values() {
        // Res(z^2 - 2, 2z) = -8
        let p = poly_i64(&[-2, 0, 1]);
        assert_eq!(resultant_uni(&p, &p.derivative()), Rat::from_integer((-8).into()));
        // Common root -> 0
        let l = poly_i64(&[-1, 1]);
        assert!(resultant_uni(&l, &l).is_zero());
        // Res(z, z - 1) = -1 and Res(z - 1, z) = 1 in this convention
        // (lc(p)^{deg q} * prod over roots of p of q).
        assert_eq!(resultant_uni(&z(), &l), Rat::from_integer((-1).into()));
        assert_eq!(resultant_uni(&l, &z()), Rat::one());
    }

    /// Independent oracle: Sylvester matrix determinant by fraction-free
    /// Gaussian elimination over Q.
    fn sylvester_resultant(p: &UniPoly, q: &UniPoly) -> Rat {
        let (m, n) = (p.degree().unwrap(), q.degree().unwrap());
        if m == 0 {
            return pow_rat(p.lc(), n as u32);
        }
        if n == 0 {
            return pow_rat(q.lc(), m as u32);
        }
        let size = m + n;
        let mut mat = vec![vec![Rat::zero(); size]; size];
        for i in 0..n {
            for k in 0..=m {
                mat[i][i + k] = p.coeff(m - k);
            }
        }
        for i in 0..m {
            for k in 0..=n {
                mat[n + i][i + k] = q.coeff(n - k);
            }
        }
        let mut det = Rat::one();
        for col in 0..size {
            let pivot = (col..size).find(|&r| !mat[r][col].is_zero());
            let Some(pr) = pivot else { return Rat::zero() };
            if pr != col {
                mat.swap(pr, col);
                det = -det;
            }
            let pv = mat[col][col].clone();
            det *= &pv;
            for r in col + 1..size {
                if mat[r][col].is_zero() {
                    continue;
                }
                let factor = &mat[r][col] / &pv;
                for c in col..size {
                    let t = &factor * &mat[col][c];
                    mat[r][c] -= t;
                }
            }
        }
        det
    }

    #[test]
    fn resultant_matches_sylvester_oracle() {
        use rand::Rng;
        let mut rng = crate::util::substream(11, 0xC0FFEE, 0);
        for _ in 0..60 {
            let dp = rng.gen_range(1..=6);
            let dq = rng.gen_range(1..=6);
            let p = random_poly(&mut rng, dp);
            let q = random_poly(&mut rng, dq);
            assert_eq!(resultant_uni(&p, &q), sylvester_resultant(&p, &q));
        }
    }

    fn random_poly<R: rand::Rng>(rng: &mut R, deg: usize) -> UniPoly {
        loop {
            let coeffs: Vec<Rat> = (0..=deg)
                .map(|_| Rat::from_integer(rng.gen_range(-10i64..=10).into()))
                .collect();
            let p = UniPoly::from_coeffs(coeffs);
            if p.degree() == Some(deg) {
                return p;
            }
        }
    }

    #[test]
    fn resultant_is_multiplicative_in_first_argument() {
        use rand::Rng;
        let mut rng = crate::util::substream(11, 0xC0FFEE, 1);
        for _ in 0..25 {
            let (da, db, dq) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
            let a = random_poly(&mut rng, da);
            let b = random_poly(&mut rng, db);
            let q = random_poly(&mut rng, dq);
            let lhs = resultant_uni(&a.mul(&b), &q);
            let rhs = resultant_uni(&a, &q) * resultant_uni(&b, &q);
            assert_eq!(lhs, rhs);
        }
    }
}
