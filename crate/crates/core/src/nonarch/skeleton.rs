//! Closed disks over Q_p with exactly represented radii.
//!
//! A point is a disk D(c, r) with rational center c and radius r = p^q for a
//! rational exponent q, or r = 0 (a classical point). All geometry happens
//! on base-p exponents, so joins, kernels, and path distances are exact
//! rational arithmetic throughout; a value is only converted to a float at
//! the very end by multiplying with ln p.

use crate::error::Error;
use crate::exact::Rat;
use crate::places::valuation;
use crate::Result;
use num::{BigUint, Signed, Zero};

/// Base-p exponent of a nonnegative quantity; `None` encodes value 0
/// (exponent minus infinity).
pub type Exp = Option<Rat>;

fn exp_max(a: &Exp, b: &Exp) -> Exp {
    match (a, b) {
        (None, x) => x.clone(),
        (x, None) => x.clone(),
        (Some(x), Some(y)) => Some(if x >= y { x.clone() } else { y.clone() }),
    }
}

fn exp_le(a: &Exp, b: &Exp) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

/// log_p |x|_p as an exponent: -v_p(x), or `None` for x = 0.
pub fn abs_exp(x: &Rat, p: u64) -> Exp {
    if x.is_zero() {
        None
    } else {
        Some(Rat::from_integer((-valuation(x, &BigUint::from(p))).into()))
    }
}

/// A closed disk D(center, p^rexp); `rexp = None` is the classical point.
#[derive(Clone, Debug)]
pub struct SkeletonPoint {
    p: u64,
    center: Rat,
    rexp: Exp,
}

impl SkeletonPoint {
    pub fn classical(p: u64, center: Rat) -> Self {
        SkeletonPoint { p, center, rexp: None }
    }

    pub fn disk(p: u64, center: Rat, rexp: Rat) -> Self {
        SkeletonPoint { p, center, rexp: Some(rexp) }
    }

    /// The Gauss point: the unit disk around 0.
    pub fn gauss(p: u64) -> Self {
        SkeletonPoint { p, center: Rat::zero(), rexp: Some(Rat::zero()) }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn center(&self) -> &Rat {
        &self.center
    }

    /// log_p of the diameter (`None` for classical points).
    pub fn diam_exp(&self) -> &Exp {
        &self.rexp
    }

    pub fn is_classical(&self) -> bool {
        self.rexp.is_none()
    }

    /// log_p of the distance between the two centers.
    pub fn center_dist_exp(&self, other: &Self) -> Exp {
        abs_exp(&(&self.center - &other.center), self.p)
    }

    /// The smallest disk containing both points.
    pub fn join(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let e = exp_max(
            &exp_max(&self.rexp, &other.rexp),
            &self.center_dist_exp(other),
        );
        SkeletonPoint { p: self.p, center: self.center.clone(), rexp: e }
    }

    /// Containment of disks (with equal prime).
    pub fn contains(&self, other: &Self) -> bool {
        exp_le(&other.rexp, &self.rexp)
            && exp_le(&self.center_dist_exp(other), &self.rexp)
    }

    /// Whether the two descriptions denote the same disk.
    pub fn same_point(&self, other: &Self) -> bool {
        match (&self.rexp, &other.rexp) {
            (None, None) => self.center == other.center,
            (Some(_), Some(_)) => self.contains(other) && other.contains(self),
            _ => false,
        }
    }

    /// log_p of the sup-norm |S| = max(|center|, diam).
    pub fn sup_exp(&self) -> Exp {
        exp_max(&abs_exp(&self.center, self.p), &self.rexp)
    }

    /// log_p of the affine Hsia kernel: the diameter of the join. For two
    /// classical points this is log_p of the p-adic distance.
    pub fn hsia_affine_exp(&self, other: &Self) -> Exp {
        self.join(other).rexp
    }

    /// log_p of the kernel normalized at infinity:
    /// hsia_affine / (max(1,|S|) max(1,|S'|)). This extends the chordal
    /// kernel and is at most 0... at most 1 in value.
    pub fn hsia_can_exp(&self, other: &Self) -> Exp {
        let aff = self.hsia_affine_exp(other)?;
        let za = self.sup_exp().filter(|e| e.is_positive()).unwrap_or_else(Rat::zero);
        let zb = other.sup_exp().filter(|e| e.is_positive()).unwrap_or_else(Rat::zero);
        Some(aff - za - zb)
    }

    /// Path distance in the hyperbolic part, in units of ln p:
    /// 2 log_p diam(join) - log_p diam(A) - log_p diam(B).
    /// Classical points are at infinite distance.
    pub fn rho_exp(&self, other: &Self) -> Result<Rat> {
        let (Some(ea), Some(eb)) = (&self.rexp, &other.rexp) else {
            return Err(Error::degenerate(
                "path distance to a classical point is infinite",
            ));
        };
        let ej = self
            .hsia_affine_exp(other)
            .expect("join of disks has positive diameter");
        Ok(&ej + &ej - ea - eb)
    }

    /// The regularized point: same center, diameter pushed up to at least
    /// p^eps_exp.
    pub fn pi_eps(&self, eps_exp: &Rat) -> Self {
        SkeletonPoint {
            p: self.p,
            center: self.center.clone(),
            rexp: Some(match &self.rexp {
                None => eps_exp.clone(),
                Some(e) => {
                    if e >= eps_exp {
                        e.clone()
                    } else {
                        eps_exp.clone()
                    }
                }
            }),
        }
    }
}

/// The point where the three pairwise paths meet: the pairwise join of
/// smallest diameter.
pub fn median(a: &SkeletonPoint, b: &SkeletonPoint, c: &SkeletonPoint) -> SkeletonPoint {
    let mut best = a.join(b);
    for j in [a.join(c), b.join(c)] {
        if exp_le(&j.rexp, &best.rexp) {
            best = j;
        }
    }
    best
}

/// The chordal-like small metric between two points with integer kernel
/// exponents: [A,B] - ([A,A] + [B,B]) / 2, as an exact rational (kernel
/// values are the integral powers p^exp). Fails on fractional exponents.
pub fn small_metric(a: &SkeletonPoint, b: &SkeletonPoint) -> Result<Rat> {
    let value = |e: &Exp| -> Result<Rat> {
        match e {
            None => Ok(Rat::zero()),
            Some(q) => {
                if !q.is_integer() {
                    return Err(Error::unsupported(
                        "small metric needs integral kernel exponents",
                    ));
                }
                let k: i64 = q
                    .numer()
                    .try_into()
                    .map_err(|_| Error::unsupported("kernel exponent out of range"))?;
                Ok(crate::exact::poly::pow_rat_i64(
                    &Rat::from_integer(a.p.into()),
                    k,
                ))
            }
        }
    };
    let ab = value(&a.hsia_can_exp(b))?;
    let aa = value(&a.hsia_can_exp(a))?;
    let bb = value(&b.hsia_can_exp(b))?;
    let two = Rat::from_integer(2.into());
    Ok(&ab - &((&aa + &bb) / &two))
}

/// Largest integer k with p^k <= eps, for mapping a real smoothing radius
/// onto an exactly representable p-adic one (always rounded down).
pub fn radius_exp_below(p: u64, eps: f64) -> i64 {
    assert!(eps > 0.0 && p >= 2);
    let lp = (p as f64).ln();
    let mut k = (eps.ln() / lp).floor() as i64;
    // Guard against boundary roundoff in either direction.
    while ((k + 1) as f64 * lp).exp() <= eps {
        k += 1;
    }
    while (k as f64 * lp).exp() > eps {
        k -= 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn cl(p: u64, n: i64, d: i64) -> SkeletonPoint {
        SkeletonPoint::classical(p, rat(n, d))
    }

    #[test]
    fn joins_and_containment() {
        // D(0, 1/3) and D(2, 1/3) in Q_3: centers at distance |2|_3 = 1.
        let a = SkeletonPoint::disk(3, rat(0, 1), rat(-1, 1));
        let b = SkeletonPoint::disk(3, rat(2, 1), rat(-1, 1));
        let j = a.join(&b);
        assert_eq!(j.diam_exp().clone(), Some(rat(0, 1)));
        assert!(j.contains(&a) && j.contains(&b));
        assert!(j.same_point(&SkeletonPoint::gauss(3)));
        // Two descriptions of one disk: D(0,1) = D(2,1) over Q_3... over any p
        // with |2| <= 1.
        let g1 = SkeletonPoint::disk(3, rat(2, 1), rat(0, 1));
        assert!(SkeletonPoint::gauss(3).same_point(&g1));
    }

    #[test]
    fn classical_distance_is_valuation() {
        // |1/3 - 2/3|_3 = |1/3|_3 = 3.
        let a = cl(3, 1, 3);
        let b = cl(3, 2, 3);
        assert_eq!(a.hsia_affine_exp(&b), Some(rat(1, 1)));
        // Canonical kernel divides out the sup norms (both are 3).
        assert_eq!(a.hsia_can_exp(&b), Some(rat(-1, 1)));
        assert_eq!(a.hsia_can_exp(&a), None);
    }

    #[test]
    fn rho_is_a_path_metric_on_disks() {
        let g = SkeletonPoint::gauss(2);
        let s = SkeletonPoint::disk(2, rat(0, 1), rat(-3, 1));
        let t = SkeletonPoint::disk(2, rat(1, 1), rat(-2, 1));
        // Gauss to D(0, 2^-3): straight shrink, distance 3 (times ln 2).
        assert_eq!(s.rho_exp(&g).unwrap(), rat(3, 1));
        // s and t branch at the join D(0,1) = Gauss: 3 + 2.
        assert_eq!(s.rho_exp(&t).unwrap(), rat(5, 1));
        assert_eq!(s.rho_exp(&s).unwrap(), rat(0, 1));
        // Triangle equality through the median on a tree.
        let m = median(&s, &t, &g);
        assert_eq!(
            s.rho_exp(&t).unwrap(),
            s.rho_exp(&m).unwrap() + m.rho_exp(&t).unwrap()
        );
        assert!(cl(2, 1, 1).rho_exp(&g).is_err());
    }

    #[test]
    fn canonical_kernel_is_gromov_product_from_gauss() {
        // log[S,S']_can = -rho(median(S, S', Gauss), Gauss) for disk points,
        // including centers outside the unit disk.
        let cases = [
            (rat(0, 1), rat(-2, 1), rat(1, 1), rat(-1, 1)),
            (rat(1, 2), rat(-3, 1), rat(4, 1), rat(0, 1)),
            (rat(3, 4), rat(-1, 1), rat(5, 8), rat(-4, 1)),
            (rat(7, 1), rat(2, 1), rat(1, 7), rat(-2, 1)),
            (rat(4, 1), rat(-3, 1), rat(6, 1), rat(-2, 1)),
        ];
        for p in [2u64, 5] {
            let g = SkeletonPoint::gauss(p);
            for (c1, e1, c2, e2) in cases.clone() {
                let s = SkeletonPoint::disk(p, c1, e1);
                let t = SkeletonPoint::disk(p, c2, e2);
                let m = median(&s, &t, &g);
                let lhs = s.hsia_can_exp(&t).unwrap();
                let rhs = -m.rho_exp(&g).unwrap();
                assert_eq!(lhs, rhs, "p = {p}");
            }
        }
    }

    #[test]
    fn regularization_lifts_diameter_and_small_metric_is_half_eps() {
        // For |z|_p <= 1 the distance from z to its eps-regularization is
        // exactly eps/2 in the small metric.
        for p in [2u64, 3, 5] {
            for (n, d) in [(0i64, 1i64), (1, 1), (2, 7)] {
                let z = cl(p, n, d);
                let eps_exp = rat(-2, 1);
                let reg = z.pi_eps(&eps_exp);
                assert_eq!(reg.diam_exp().clone(), Some(eps_exp.clone()));
                let eps = Rat::new(1.into(), (p * p).into());
                let got = small_metric(&z, &reg).unwrap();
                assert_eq!(got, eps / Rat::from_integer(2.into()), "p = {p}");
            }
        }
        // Already-fat disks are left alone.
        let fat = SkeletonPoint::disk(2, rat(0, 1), rat(3, 1));
        assert!(fat.pi_eps(&rat(-1, 1)).same_point(&fat));
    }

    #[test]
    fn small_metric_extends_the_classical_kernel() {
        // On classical points with |.| <= 1 it is just the p-adic distance.
        let a = cl(5, 2, 1);
        let b = cl(5, 7, 1);
        // |2-7|_5 = 1/5.
        assert_eq!(small_metric(&a, &b).unwrap(), rat(1, 5));
        let frac = SkeletonPoint::disk(5, rat(0, 1), rat(1, 2));
        assert!(small_metric(&frac, &a).is_err());
    }

    #[test]
    fn rounded_radius_exponent() {
        assert_eq!(radius_exp_below(2, 0.5), -1);
        assert_eq!(radius_exp_below(2, 0.49), -2);
        assert_eq!(radius_exp_below(3, 1.0), 0);
        assert_eq!(radius_exp_below(3, 0.9), -1);
        assert_eq!(radius_exp_below(5, 0.2), -1);
    }
}
