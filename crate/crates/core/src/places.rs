//! Places of the rational field and exact bookkeeping of logarithms.
//!
//! The ground field carries one archimedean place and one place per prime,
//! every place with weight 1, and the absolute values satisfy the product
//! formula: for nonzero rational x the weighted sum of log|x| over all
//! places vanishes. Identities proved over this field are checked here
//! *exactly*, by tracking numbers of the shape `sum c_p log p` with rational
//! coefficients instead of floats.

use crate::error::Error;
use crate::exact::{Rat, UniPoly};
use crate::Result;
use num::{BigInt, BigUint, Integer, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A place of the rational field.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Place {
    Inf,
    Prime(BigUint),
}

impl Place {
    pub fn prime(p: u64) -> Self {
        Place::Prime(BigUint::from(p))
    }

    /// Weight of the place in global sums. Constant 1 for this field; kept
    /// explicit so the height formulas show where the weights enter.
    pub fn weight(&self) -> u32 {
        1
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Inf => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rat, p: &BigUint) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    let pi = BigInt::from(p.clone());
    int_valuation(x.numer(), &pi) - int_valuation(x.denom(), &pi)
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            break;
        }
        n = q;
        v += 1;
    }
    v
}

const TRIAL_BOUND: u64 = 1_000_000;

/// Deterministic Miller-Rabin for the sizes this library meets: the fixed
/// witness set is exact below 3.3e24, far past anything a trial-division
/// cofactor of two 7-digit-plus primes reaches in the test corpus.
fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if n == &two {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        if &a % n == BigUint::zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factor a positive integer: trial division through 10^6, then a primality
/// check on the cofactor. A composite cofactor (two prime factors both past
/// the trial bound) is refused rather than mis-factored.
pub fn factor(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::degenerate("factoring zero"));
    }
    let mut rem = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut push = |p: BigUint, rem: &mut BigUint| {
        let mut e = 0u32;
        loop {
            let (q, r) = rem.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            *rem = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(BigUint::from(2u32), &mut rem);
    push(BigUint::from(3u32), &mut rem);
    let mut k = 5u64;
    while k <= TRIAL_BOUND {
        if BigUint::from(k) * BigUint::from(k) > rem {
            break;
        }
        push(BigUint::from(k), &mut rem);
        push(BigUint::from(k + 2), &mut rem);
        k += 6;
    }
    if !rem.is_one() {
        if is_probable_prime(&rem) {
            out.push((rem, 1));
        } else {
            return Err(Error::unsupported(format!(
                "cofactor {rem} is composite with no factor below {TRIAL_BOUND}"
            )));
        }
    }
    out.sort();
    Ok(out)
}

/// Factor the absolute value of a nonzero integer.
pub fn factor_abs(n: &BigInt) -> Result<Vec<(BigUint, u32)>> {
    factor(n.magnitude())
}

/// A number of the form `sum_p c_p log p` with rational coefficients,
/// supported on finitely many primes. Closed under the exact operations the
/// height identities need; equality to zero is decidable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactLog(BTreeMap<BigUint, Rat>);

impl ExactLog {
    pub fn zero() -> Self {
        ExactLog(BTreeMap::new())
    }

    pub fn single(p: BigUint, c: Rat) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(p, c);
        }
        ExactLog(m)
    }

    /// Exact `log |x|` of a nonzero rational, via factorization.
    pub fn ln_abs(x: &Rat) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::degenerate("log of zero"));
        }
        let mut m = BTreeMap::new();
        for (p, e) in factor_abs(x.numer())? {
            *m.entry(p).or_insert_with(Rat::zero) += Rat::from_integer(e.into());
        }
        for (p, e) in factor_abs(x.denom())? {
            *m.entry(p).or_insert_with(Rat::zero) -= Rat::from_integer(e.into());
        }
        m.retain(|_, c| !c.is_zero());
        Ok(ExactLog(m))
    }

    pub fn add(&self, other: &ExactLog) -> ExactLog {
        let mut m = self.0.clone();
        for (p, c) in &other.0 {
            let e = m.entry(p.clone()).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                m.remove(p);
            }
        }
        ExactLog(m)
    }

    pub fn scale(&self, c: &Rat) -> ExactLog {
        if c.is_zero() {
            return ExactLog::zero();
        }
        ExactLog(self.0.iter().map(|(p, u)| (p.clone(), u * c)).collect())
    }

    pub fn coeff(&self, p: &BigUint) -> Rat {
        self.0.get(p).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rat)> {
        self.0.iter()
    }

    pub fn to_f64(&self) -> f64 {
        let mut acc = crate::util::Kahan::default();
        for (p, c) in &self.0 {
            acc.add(crate::util::rat_to_f64(c) * crate::util::ln_biguint(p));
        }
        acc.total()
    }
}

/// `log |x|_v` as a float: the archimedean log, or `-v_p(x) log p`.
pub fn ln_abs_place(x: &Rat, place: &Place) -> f64 {
    match place {
        Place::Inf => crate::util::ln_rat_abs(x),
        Place::Prime(p) => -(valuation(x, p) as f64) * crate::util::ln_biguint(p),
    }
}

/// Exact product-formula check for a nonzero rational: the archimedean log
/// (expanded through factorization) plus the finite-place logs (computed
/// independently through valuations at the support primes) must cancel.
pub fn product_formula_check(x: &Rat) -> Result<bool> {
    let arch = ExactLog::ln_abs(x)?;
    let mut total = arch.clone();
    for (p, _) in arch.terms() {
        let v = valuation(x, p);
        total = total.add(&ExactLog::single(p.clone(), Rat::from_integer((-v).into())));
    }
    Ok(total.is_zero())
}

/// `min_k v_p(c_k)` over the nonzero coefficients. The Gauss norm of the
/// polynomial at p is `p^{-gauss_valuation}`.
pub fn gauss_valuation(poly: &UniPoly, p: &BigUint) -> i64 {
    assert!(!poly.is_zero(), "Gauss norm of zero polynomial");
    poly.coeffs()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| valuation(c, p))
        .min()
        .expect("nonzero polynomial has a nonzero coefficient")
}

/// Positive generator of the coefficients' fractional ideal: `v_p(content)`
/// equals the minimal coefficient valuation at every prime.
pub fn rational_content(poly: &UniPoly) -> Rat {
    assert!(!poly.is_zero(), "content of zero polynomial");
    let mut den = BigInt::one();
    for c in poly.coeffs() {
        if !c.is_zero() {
            den = den.lcm(c.denom());
        }
    }
    let mut g = BigInt::zero();
    for c in poly.coeffs() {
        if !c.is_zero() {
            g = g.gcd(&(c.numer() * (&den / c.denom())));
        }
    }
    Rat::new(g, den)
}

/// Primes where a nonzero polynomial's Gauss norm differs from 1.
pub fn coefficient_places(poly: &UniPoly) -> Result<Vec<BigUint>> {
    let content = rational_content(poly);
    let mut out: Vec<BigUint> = factor_abs(content.numer())?
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    out.extend(factor_abs(content.denom())?.into_iter().map(|(p, _)| p));
    out.sort();
    out.dedup();
    Ok(out)
}

/// Places where a self-map can have nontrivial local contribution: the
/// archimedean place plus every prime dividing the resultant of the
/// content-normalized lift. Everywhere else the normalized coefficients are
/// units in the right sense and the map reduces well.
pub fn relevant_places(f: &crate::exact::MapLift) -> Result<Vec<Place>> {
    let g = crate::exact::form::normalize_content(f);
    let mut out = vec![Place::Inf];
    if !g.resultant().denom().is_one() {
        // Cannot happen after content normalization; defend anyway.
        return Err(Error::numeric("normalized resultant is not an integer"));
    }
    for (p, _) in factor_abs(g.resultant().numer())? {
        out.push(Place::Prime(p));
    }
    Ok(out)
}
