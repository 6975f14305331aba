//! Exact pair sums at a finite prime for divisors with rational support.
//!
//! Every kernel value at a prime p is an integral power of p, so sums of
//! kernel logs are integer multiples of ln p. This module keeps the
//! coefficient of ln p as an exact rational and only multiplies by ln p at
//! the float boundary. Divisors whose support is not defined over Q are
//! rejected rather than approximated.

use super::skeleton::{abs_exp, Exp, SkeletonPoint};
use crate::error::Error;
use crate::exact::divisor::ZerosDivisor;
use crate::exact::poly::UniPoly;
use crate::exact::Rat;
use crate::places::factor;
use crate::Result;
use num::{BigInt, BigUint, One, Signed, Zero};

/// A support point of a divisor on the projective line over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportPoint {
    Finite(Rat),
    Infinity,
}

/// The divisor's support as exact rational points with multiplicities.
/// Fails when any root of the defining polynomial is irrational.
pub fn rational_support(z: &ZerosDivisor) -> Result<Vec<(SupportPoint, u32)>> {
    let mut out: Vec<(SupportPoint, u32)> = Vec::new();
    for stratum in &z.strata().strata {
        for root in rational_roots(&stratum.poly)? {
            out.push((SupportPoint::Finite(root), stratum.mult));
        }
    }
    if z.inf_mult() > 0 {
        out.push((SupportPoint::Infinity, z.inf_mult() as u32));
    }
    debug_assert_eq!(
        out.iter().map(|(_, m)| *m as usize).sum::<usize>(),
        z.degree()
    );
    Ok(out)
}

/// All rational roots of a squarefree polynomial, which must account for its
/// full degree.
fn rational_roots(q: &UniPoly) -> Result<Vec<Rat>> {
    let deg = q.degree().ok_or_else(|| Error::degenerate("zero polynomial"))?;
    let mut roots = Vec::new();
    let mut body = q.clone();
    if q.ord_at_zero() > 0 {
        roots.push(Rat::zero());
        body = body.div_exact(&UniPoly::monomial(Rat::one(), 1));
    }
    let d = match body.degree() {
        Some(0) | None => {
            return finish_roots(roots, deg);
        }
        Some(d) => d,
    };
    // Integer model: candidates r/s with r | trailing and s | leading.
    let mut den = BigInt::one();
    for c in body.coeffs() {
        den = num::integer::lcm(den, c.denom().clone());
    }
    let ints: Vec<BigInt> = body
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let trailing = ints[0].magnitude().clone();
    let leading = ints[d].magnitude().clone();
    let (rs, ss) = (divisors(&trailing)?, divisors(&leading)?);
    if rs.len().saturating_mul(ss.len()) > 100_000 {
        return Err(Error::unsupported(
            "rational-root search space too large for exact support extraction",
        ));
    }
    let mut seen: Vec<Rat> = Vec::new();
    for r in &rs {
        for s in &ss {
            let base = Rat::new(BigInt::from(r.clone()), BigInt::from(s.clone()));
            for cand in [base.clone(), -base] {
                if seen.contains(&cand) {
                    continue;
                }
                seen.push(cand.clone());
                if body.eval(&cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    finish_roots(roots, deg)
}

fn finish_roots(roots: Vec<Rat>, deg: usize) -> Result<Vec<Rat>> {
    if roots.len() == deg {
        Ok(roots)
    } else {
        Err(Error::unsupported(
            "divisor support is not rational; exact p-adic sums are unavailable",
        ))
    }
}

/// All positive divisors of n (n > 0), from its prime factorization.
fn divisors(n: &BigUint) -> Result<Vec<BigUint>> {
    if n.is_zero() {
        return Err(Error::degenerate("divisors of zero"));
    }
    let fac = factor(n)?;
    let count: usize = fac.iter().map(|(_, e)| *e as usize + 1).product();
    if count > 4096 {
        return Err(Error::unsupported("too many divisors to enumerate"));
    }
    let mut out = vec![BigUint::one()];
    for (p, e) in fac {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pw = BigUint::one();
            for _ in 0..=e {
                next.push(d * &pw);
                pw *= &p;
            }
        }
        out = next;
    }
    Ok(out)
}

fn pos_part(e: &Exp) -> Rat {
    match e {
        Some(q) if q.is_positive() => q.clone(),
        _ => Rat::zero(),
    }
}

/// log_p of the canonical kernel between two rational points; `None` when
/// they coincide (kernel zero).
pub fn can_kernel_exp(a: &SupportPoint, b: &SupportPoint, p: u64) -> Exp {
    match (a, b) {
        (SupportPoint::Infinity, SupportPoint::Infinity) => None,
        (SupportPoint::Finite(x), SupportPoint::Infinity)
        | (SupportPoint::Infinity, SupportPoint::Finite(x)) => {
            Some(-pos_part(&abs_exp(x, p)))
        }
        (SupportPoint::Finite(x), SupportPoint::Finite(y)) => {
            let dist = abs_exp(&(x - y), p)?;
            Some(dist - pos_part(&abs_exp(x, p)) - pos_part(&abs_exp(y, p)))
        }
    }
}

/// The support point as a classical disk point (center only meaningful for
/// finite points; infinity maps through the inverted coordinate 1/z = 0...
/// infinity is not represented and is rejected).
pub fn support_as_skeleton(s: &SupportPoint, p: u64) -> Result<SkeletonPoint> {
    match s {
        SupportPoint::Finite(x) => Ok(SkeletonPoint::classical(p, x.clone())),
        SupportPoint::Infinity => Err(Error::unsupported(
            "infinity has no affine disk model",
        )),
    }
}

/// Exact off-diagonal pair sum of the divisor at p with the trivial weight:
/// the coefficient of ln p in sum over ordered pairs of m_i m_j log[w_i, w_j].
pub fn fekete_sum_p(z: &ZerosDivisor, p: u64) -> Result<Rat> {
    let sup = rational_support(z)?;
    let mut acc = Rat::zero();
    for i in 0..sup.len() {
        for j in (i + 1)..sup.len() {
            let e = can_kernel_exp(&sup[i].0, &sup[j].0, p)
                .ok_or_else(|| Error::degenerate("coincident support points"))?;
            let m = Rat::from_integer((2 * sup[i].1 as i64 * sup[j].1 as i64).into());
            acc += m * e;
        }
    }
    Ok(acc)
}

/// Coefficient of ln p in the root-free Mahler term at p: log_p of the Gauss
/// sup norm of the defining form's coefficients.
pub fn msharp_p(z: &ZerosDivisor, p: u64) -> Rat {
    let pp = BigUint::from(p);
    let mut min_v: Option<i64> = None;
    for c in z.form().coeffs() {
        if c.is_zero() {
            continue;
        }
        let v = crate::places::valuation(c, &pp);
        min_v = Some(match min_v {
            None => v,
            Some(m) => m.min(v),
        });
    }
    Rat::from_integer((-min_v.expect("nonzero form")).into())
}

/// Both sides of the local pair-sum identity at p with the trivial weight,
/// as exact coefficients of ln p:
///
///   (Z,Z)_p + 2 sum_{w != inf} m_w^2 log[w, inf]
///     = 2 deg log|lc|_p + log|D*|_p - 2 deg M_p(P).
pub fn local_identity_check_p(z: &ZerosDivisor, p: u64) -> Result<(Rat, Rat)> {
    let sup = rational_support(z)?;
    let deg = Rat::from_integer((z.degree() as i64).into());
    let mut lhs = fekete_sum_p(z, p)?;
    for (s, m) in &sup {
        if let SupportPoint::Finite(_) = s {
            let e = can_kernel_exp(s, &SupportPoint::Infinity, p).expect("finite vs inf");
            lhs += Rat::from_integer((2 * (*m as i64) * (*m as i64)).into()) * e;
        }
    }
    let pp = BigUint::from(p);
    let log_lc = Rat::from_integer((-crate::places::valuation(z.lc(), &pp)).into());
    let dstar = crate::exact::divisor::dstar_divisor(z);
    let log_dstar = if dstar.is_zero() {
        return Err(Error::degenerate("divisor with repeated support"));
    } else {
        Rat::from_integer((-crate::places::valuation(&dstar, &pp)).into())
    };
    let two = Rat::from_integer(2.into());
    let rhs = &two * &deg * log_lc + log_dstar - &two * &deg * msharp_p(z, p);
    Ok((lhs, rhs))
}

/// The smoothed log kernel at a finite prime: S maps to
/// log_p [w0, join(S, pi_eps(w0))]_can, a bounded 1-Lipschitz function on
/// the disk space that agrees with the plain kernel log away from w0.
pub struct SmoothedKernelP {
    w0: SkeletonPoint,
    reg: SkeletonPoint,
}

impl SmoothedKernelP {
    pub fn new(w0: SkeletonPoint, eps_exp: Rat) -> Self {
        let reg = w0.pi_eps(&eps_exp);
        SmoothedKernelP { w0, reg }
    }

    pub fn center(&self) -> &SkeletonPoint {
        &self.w0
    }

    pub fn regularized_center(&self) -> &SkeletonPoint {
        &self.reg
    }

    /// Kernel exponent (coefficient of ln p).
    pub fn eval_exp(&self, s: &SkeletonPoint) -> Rat {
        self.w0
            .hsia_can_exp(&s.join(&self.reg))
            .expect("regularized kernel never vanishes")
    }

    /// Slope bound along the tree, in exponent units: the kernel log moves
    /// at most as fast as the path parameter.
    pub fn lipschitz_exponent(&self) -> Rat {
        Rat::one()
    }
}
