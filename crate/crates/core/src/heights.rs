//! Adelic weights and global heights of divisors over Q.
//!
//! A weight assigns a continuous function to every place at once; the height
//! of a zeros divisor is then the average over places of the weighted
//! logarithmic Mahler measure of a defining form. The product formula makes
//! the average independent of the chosen form, which is what lets the finite
//! places be handled exactly (Gauss norms, escape valuations) while only the
//! archimedean place carries floating error.
//!
//! Everything numeric travels with an error bound; every finite place that
//! appears in a report says how its value was obtained, and every place left
//! out is provably a zero contribution (unit Gauss norm, good reduction).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{BigInt, BigUint, Integer, One, Zero};
use serde::Serialize;

use crate::arch::fekete::{fekete_sum, mahler_g, msharp_inf, WeightFn};
use crate::arch::green::{equilibrium_sample, GreenEvaluator};
use crate::arch::point::{self, PPoint};
use crate::arch::roots::roots_of_divisor;
use crate::error::Error;
use crate::exact::form::normalize_content;
use crate::exact::{dstar_divisor, divisor_fn_eq_a, CoeffBudget, MapLift, Rat, ZerosDivisor};
use crate::nonarch::{
    can_kernel_exp, fekete_sum_p, green_escape_p, msharp_p, rational_support, SupportPoint,
};
use crate::places::{coefficient_places, factor_abs, relevant_places, valuation, Place};
use crate::util::{rat_to_f64, Kahan};
use crate::Result;

/// Iteration depth for p-adic escape valuations; the tail is then
/// `v(Res) / ((d-1) d^64)`, far below any tolerance used here.
const DEPTH_P: u32 = 64;

/// One weight function per place, specified globally.
pub enum AdelicWeight {
    /// Zero at every place: bare chordal/canonical potential theory.
    Trivial,
    /// The normalized escape-rate weight of a degree >= 2 self-map at every
    /// place. Finite places contribute only at primes dividing the resultant
    /// of the content-normalized lift; everywhere else the weight vanishes
    /// identically on the relevant points.
    DynamicalGreen(MapLift),
    /// A caller-supplied archimedean weight, zero at every finite place.
    Explicit(WeightFn),
}

impl AdelicWeight {
    pub fn label(&self) -> String {
        match self {
            AdelicWeight::Trivial => "trivial".into(),
            AdelicWeight::DynamicalGreen(f) => format!("green[deg {}]", f.deg()),
            AdelicWeight::Explicit(w) => w.label().to_string(),
        }
    }
}

/// A weight with its per-place evaluation machinery built once.
pub(crate) struct PreparedWeight {
    pub(crate) arch: WeightFn,
    pub(crate) dynamical: Option<DynWeight>,
}

pub(crate) struct DynWeight {
    pub(crate) norm: MapLift,
    pub(crate) green: Arc<GreenEvaluator>,
    /// Primes dividing the resultant of the normalized lift, ascending.
    pub(crate) bad_primes: Vec<u64>,
}

impl DynWeight {
    fn vres(&self, p: u64) -> i64 {
        valuation(self.norm.resultant(), &BigUint::from(p))
    }

    /// Coefficient of `ln p` in the per-place mass normalizer: half the
    /// equilibrium energy, `v_p(Res) / (2 d (d-1))`.
    fn mass_shift(&self, p: u64) -> Rat {
        let d = self.norm.deg() as i64;
        Rat::new(BigInt::from(self.vres(p)), BigInt::from(2 * d * (d - 1)))
    }

    /// Normalized weight of a rational point at a finite place, as
    /// `(coefficient of ln p, tail-bound coefficient of ln p)`.
    fn ghat_coeff(&self, s: &SupportPoint, p: u64) -> Result<(Rat, Rat)> {
        let (x0, x1) = match s {
            SupportPoint::Finite(a) => (a.denom().clone(), a.numer().clone()),
            SupportPoint::Infinity => (BigInt::zero(), BigInt::one()),
        };
        let esc = green_escape_p(&self.norm, &x0, &x1, p, DEPTH_P)?;
        Ok((esc.coeff + self.mass_shift(p), esc.tail_coeff))
    }
}

pub(crate) fn prepare(weight: &AdelicWeight) -> Result<PreparedWeight> {
    match weight {
        AdelicWeight::Trivial => Ok(PreparedWeight {
            arch: WeightFn::trivial(),
            dynamical: None,
        }),
        AdelicWeight::Explicit(w) => Ok(PreparedWeight {
            arch: w.clone(),
            dynamical: None,
        }),
        AdelicWeight::DynamicalGreen(f) => {
            let norm = normalize_content(f);
            let green = Arc::new(GreenEvaluator::new(&norm, GreenEvaluator::DEFAULT_DEPTH)?);
            let mut arch = GreenEvaluator::weight_fn(&green, weight.label());
            arch.fit_holder(1.0, 0x68656967, 1200);
            let mut bad_primes = Vec::new();
            for place in relevant_places(f)? {
                if let Place::Prime(p) = place {
                    bad_primes.push(prime_u64(&p)?);
                }
            }
            Ok(PreparedWeight {
                arch,
                dynamical: Some(DynWeight {
                    norm,
                    green,
                    bad_primes,
                }),
            })
        }
    }
}

fn prime_u64(p: &BigUint) -> Result<u64> {
    u64::try_from(p.clone())
        .map_err(|_| Error::unsupported(format!("prime {p} exceeds the machine-prime range")))
}

/// One place's share of a height, already divided by the divisor degree so
/// that the rows sum to the total.
#[derive(Clone, Debug, Serialize)]
pub struct PlaceEntry {
    pub place: String,
    pub value: f64,
    pub error: f64,
    /// "exact", "numeric", or "shortcut-zero".
    pub method: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HeightReport {
    pub weight: String,
    pub degree: usize,
    pub per_place: Vec<PlaceEntry>,
    /// Sum of the per-place values.
    pub total: f64,
    pub total_error: f64,
    pub note: String,
}

/// Weighted height of a divisor: the per-place weighted Mahler measures of a
/// defining form, averaged over places, degree-1 normalized.
///
/// Finite places are exact except for escape tails at bad-reduction primes
/// of a dynamical weight; those in turn require the divisor's roots to be
/// rational, and the error explains itself when they are not.
pub fn height_g(z: &ZerosDivisor, weight: &AdelicWeight) -> Result<HeightReport> {
    let pw = prepare(weight)?;
    height_prepared(z, &weight.label(), &pw)
}

pub(crate) fn height_prepared(
    z: &ZerosDivisor,
    label: &str,
    pw: &PreparedWeight,
) -> Result<HeightReport> {
    let deg = z.degree();
    if deg == 0 {
        return Err(Error::degenerate("height of the empty divisor"));
    }
    let degf = deg as f64;
    let cloud = roots_of_divisor(z, 1e-7)?;

    let (mv, me) = mahler_g(z, &cloud, &pw.arch);
    let mut rows = vec![PlaceEntry {
        place: "inf".into(),
        value: mv / degf,
        error: me / degf,
        method: "numeric".into(),
    }];

    let mut primes: BTreeSet<u64> = BTreeSet::new();
    for p in coefficient_places(z.finite_part())? {
        primes.insert(prime_u64(&p)?);
    }
    let dyn_bad: &[u64] = pw
        .dynamical
        .as_ref()
        .map(|d| d.bad_primes.as_slice())
        .unwrap_or(&[]);
    primes.extend(dyn_bad.iter().copied());

    // Green corrections at bad primes need the support pointwise.
    let support = if pw.dynamical.is_some() && !dyn_bad.is_empty() {
        Some(rational_support(z).map_err(|e| {
            Error::unsupported(format!(
                "dynamical green terms at bad primes {dyn_bad:?} need rational roots: {e}"
            ))
        })?)
    } else {
        None
    };

    for p in primes {
        let lnp = (p as f64).ln();
        let mut coeff = msharp_p(z, p);
        let mut err = 0.0;
        let mut tails_zero = true;
        if let (Some(dw), Some(sup)) = (pw.dynamical.as_ref(), support.as_ref()) {
            if dw.bad_primes.contains(&p) {
                for (s, m) in sup {
                    let (c, tail) = dw.ghat_coeff(s, p)?;
                    coeff += Rat::from_integer((*m as i64).into()) * c;
                    err += *m as f64 * rat_to_f64(&tail) * lnp;
                    tails_zero &= tail.is_zero();
                }
            }
        }
        let method = if coeff.is_zero() && err == 0.0 {
            "shortcut-zero"
        } else if tails_zero {
            "exact"
        } else {
            "numeric"
        };
        rows.push(PlaceEntry {
            place: p.to_string(),
            value: rat_to_f64(&coeff) * lnp / degf,
            error: err / degf,
            method: method.into(),
        });
    }

    let total: f64 = rows.iter().map(|r| r.value).sum();
    let total_error: f64 =
        rows.iter().map(|r| r.error).sum::<f64>() + 4e-16 * rows.iter().map(|r| r.value.abs()).sum::<f64>();
    Ok(HeightReport {
        weight: label.to_string(),
        degree: deg,
        per_place: rows,
        total,
        total_error,
        note: "places not listed have unit Gauss norms and, for dynamical weights, \
               good reduction; they contribute exactly zero"
            .into(),
    })
}

/// Canonical height of a rational projective point `(x0 : x1)` under a
/// degree >= 2 self-map: the escape value of a coprime integer representative
/// at every place where it can be nonzero. Good-reduction primes vanish
/// identically and are left out of the report.
pub fn canonical_height_point(f: &MapLift, x0: &BigInt, x1: &BigInt) -> Result<HeightReport> {
    if x0.is_zero() && x1.is_zero() {
        return Err(Error::degenerate("the zero pair is not a projective point"));
    }
    let g = x0.gcd(x1);
    let (a0, a1) = (x0 / &g, x1 / &g);

    let norm = normalize_content(f);
    let green = GreenEvaluator::new(&norm, GreenEvaluator::DEFAULT_DEPTH)?;

    // ln||a|| splits off exactly; the unit direction carries the iteration.
    let pt = PPoint::from_rational(&Rat::from_integer(a0.clone()), &Rat::from_integer(a1.clone()))?;
    let (esc, tail) = green.escape(&pt)?;
    let norm_sq = Rat::from_integer(&a0 * &a0 + &a1 * &a1);
    let ln_norm = 0.5 * crate::util::ln_rat_abs(&norm_sq);
    let mut rows = vec![PlaceEntry {
        place: "inf".into(),
        value: esc + ln_norm,
        error: tail + 1e-13 * (1.0 + ln_norm.abs()),
        method: "numeric".into(),
    }];

    for place in relevant_places(f)? {
        let Place::Prime(p) = place else { continue };
        let p = prime_u64(&p)?;
        let esc = green_escape_p(&norm, &a0, &a1, p, DEPTH_P)?;
        let lnp = (p as f64).ln();
        let method = if esc.coeff.is_zero() && esc.tail_coeff.is_zero() {
            "shortcut-zero"
        } else if esc.tail_coeff.is_zero() {
            "exact"
        } else {
            "numeric"
        };
        rows.push(PlaceEntry {
            place: p.to_string(),
            value: rat_to_f64(&esc.coeff) * lnp,
            error: rat_to_f64(&esc.tail_coeff) * lnp,
            method: method.into(),
        });
    }

    let total: f64 = rows.iter().map(|r| r.value).sum();
    let total_error: f64 = rows.iter().map(|r| r.error).sum::<f64>() + 1e-14;
    Ok(HeightReport {
        weight: format!("green[deg {}]", f.deg()),
        degree: 1,
        per_place: rows,
        total,
        total_error,
        note: "good-reduction primes act isometrically on coprime coordinates \
               and contribute exactly zero"
            .into(),
    })
}

/// Sum over all places of the root-free Mahler parts (leading coefficient
/// and Gauss norms at the finite places, the coefficient/norm term at the
/// archimedean place). Always nonnegative up to the archimedean error.
pub fn msharp_sum(z: &ZerosDivisor) -> Result<(f64, f64)> {
    let cloud = roots_of_divisor(z, 1e-7)?;
    let (mut v, e) = msharp_inf(z, &cloud);
    for p in coefficient_places(z.finite_part())? {
        let p = prime_u64(&p)?;
        v += rat_to_f64(&msharp_p(z, p)) * (p as f64).ln();
    }
    Ok((v, e))
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GlobalIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub error_bound: f64,
    /// True when every finite-place term on both sides was exact (no escape
    /// tails), so the gap is purely archimedean noise.
    pub finite_exact: bool,
}

/// Both sides of the global pairing identity
/// `sum_v [(Z,Z)_{g_v} + 2 sum_{w != inf} m_w^2 ln[w,inf]_v]
///  = -2 (deg Z)^2 h_g(Z) + 2 sum_v sum_w m_w^2 g_v(w)`.
///
/// Finite places are exact and need rational roots; the archimedean side
/// runs on the numeric root cloud.
pub fn global_fekete_identity(z: &ZerosDivisor, weight: &AdelicWeight) -> Result<GlobalIdentity> {
    let deg = z.degree();
    if deg == 0 {
        return Err(Error::degenerate("pairing of the empty divisor"));
    }
    let degf = deg as f64;
    let pw = prepare(weight)?;
    let cloud = roots_of_divisor(z, 1e-7)?;
    let support = rational_support(z).map_err(|e| {
        Error::unsupported(format!(
            "the global pairing identity needs rational roots at the finite places: {e}"
        ))
    })?;

    let mut lhs = Kahan::new();
    let mut err;
    let mut finite_exact = true;

    // Archimedean: off-diagonal pairing plus the boundary terms to infinity.
    let (fs, fs_err) = fekete_sum(&cloud, &pw.arch);
    lhs.add(fs);
    err = fs_err;
    let inf = PPoint::infinity();
    for (i, (pt, m)) in cloud.points().iter().enumerate() {
        if !pt.is_infinity() {
            let mm = (*m as f64) * (*m as f64);
            lhs.add(2.0 * mm * point::ln_chordal(pt, &inf));
            err += mm * cloud.pos_err(i);
        }
    }

    // Candidate primes: anywhere a root, a root difference, the leading
    // coefficient, or a form coefficient has nonzero valuation, plus the
    // weight's bad primes. Everywhere else both sides vanish term by term.
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    for p in coefficient_places(z.finite_part())? {
        primes.insert(prime_u64(&p)?);
    }
    let dstar = dstar_divisor(z);
    for side in [dstar.numer(), dstar.denom(), z.lc().numer(), z.lc().denom()] {
        if !side.is_zero() {
            for (p, _) in factor_abs(side)? {
                primes.insert(prime_u64(&p)?);
            }
        }
    }
    let dyn_bad: Vec<u64> = pw
        .dynamical
        .as_ref()
        .map(|d| d.bad_primes.clone())
        .unwrap_or_default();
    primes.extend(dyn_bad.iter().copied());

    // Escape coefficients are reused on both sides of the identity.
    let mut ghat: BTreeMap<(u64, usize), (Rat, Rat)> = BTreeMap::new();
    if let Some(dw) = pw.dynamical.as_ref() {
        for &p in &dyn_bad {
            for (i, (s, _)) in support.iter().enumerate() {
                let ct = dw.ghat_coeff(s, p)?;
                finite_exact &= ct.1.is_zero();
                ghat.insert((p, i), ct);
            }
        }
    }

    for &p in &primes {
        let lnp = (p as f64).ln();
        let mut coeff = fekete_sum_p(z, p)?;
        for (s, m) in &support {
            if let SupportPoint::Finite(_) = s {
                let e = can_kernel_exp(s, &SupportPoint::Infinity, p).expect("distinct points");
                coeff += Rat::from_integer((2 * (*m as i64) * (*m as i64)).into()) * e;
            }
        }
        if dyn_bad.contains(&p) {
            for (i, (_, m)) in support.iter().enumerate() {
                let (c, t) = &ghat[&(p, i)];
                let w = *m as i64;
                coeff -= Rat::from_integer((2 * w * (deg as i64 - w)).into()) * c;
                err += 2.0 * (*m as f64) * (degf - *m as f64) * rat_to_f64(t) * lnp;
            }
        }
        lhs.add(rat_to_f64(&coeff) * lnp);
    }

    // Right side: the height term and the diagonal weight sums.
    let h = height_prepared(z, "pairing", &pw)?;
    let mut rhs = Kahan::new();
    rhs.add(-2.0 * degf * degf * h.total);
    err += 2.0 * degf * degf * h.total_error;
    let (hexp, hc) = pw.arch.holder();
    for (i, (pt, m)) in cloud.points().iter().enumerate() {
        let mm = (*m as f64) * (*m as f64);
        rhs.add(2.0 * mm * pw.arch.eval(pt));
        err += 2.0 * mm * (pw.arch.eval_err() + hc * cloud.pos_err(i).powf(hexp));
    }
    for &p in &dyn_bad {
        let lnp = (p as f64).ln();
        let mut coeff = Rat::zero();
        for (i, (_, m)) in support.iter().enumerate() {
            let (c, t) = &ghat[&(p, i)];
            let w = *m as i64;
            coeff += Rat::from_integer((2 * w * w).into()) * c;
            err += 2.0 * (*m as f64) * (*m as f64) * rat_to_f64(t) * lnp;
        }
        rhs.add(rat_to_f64(&coeff) * lnp);
    }

    let lhs = lhs.total();
    let rhs = rhs.total();
    Ok(GlobalIdentity {
        lhs,
        rhs,
        gap: lhs - rhs,
        error_bound: err + 1e-12 * (1.0 + lhs.abs() + rhs.abs()),
        finite_exact,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SmallnessRow {
    pub n: u32,
    pub degree: usize,
    /// Absent when the divisor's roots are irrational at a bad prime, where
    /// the exact finite-place route does not apply; the bound still does.
    pub height: Option<f64>,
    pub height_error: Option<f64>,
    pub bound: f64,
    pub bound_error: f64,
    /// `degree * height`; stays bounded when the heights decay like 1/deg.
    pub scaled_height: Option<f64>,
    pub scaled_bound: f64,
}

/// Heights of the divisors `[f^n = a]` against the decay bound
/// `sum_v int ((T_{F^n,v} + T_{A,v}) / (d^n + deg a) - g_{F,v}) dmu_v`,
/// with the archimedean integral sampled along equilibrium backward orbits
/// and the finite places evaluated exactly at the Gauss point.
pub fn heights_smallness_scan(
    f: &MapLift,
    a: &MapLift,
    n_max: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<SmallnessRow>> {
    let budget = CoeffBudget::default();
    let weight = AdelicWeight::DynamicalGreen(f.clone());
    let pw = prepare(&weight)?;
    let dw = pw.dynamical.as_ref().expect("dynamical weight");
    let d = dw.norm.deg();
    let df = d as f64;
    let e = a.deg();
    let norm_a = normalize_content(a);

    // Backward-orbit sample of the equilibrium measure, with the base map's
    // escape values and the forward ladder ln||F(u_k)|| for the iterated
    // T-values: ln||F^n(u)|| = sum_k d^{n-1-k} ln||F(u_k)|| for unit u.
    let m = samples.max(64);
    let pts = equilibrium_sample(&dw.norm, m, seed)?;
    let mut gvals = Vec::with_capacity(m);
    let mut ladder: Vec<Vec<f64>> = Vec::with_capacity(m);
    for pt in &pts {
        gvals.push(dw.green.escape(pt)?.0);
        let mut steps = Vec::with_capacity(n_max as usize);
        let mut u = *pt;
        for _ in 0..n_max {
            steps.push(dw.green.t_f(&u));
            u = dw.green.apply(&u)?;
        }
        ladder.push(steps);
    }
    let ta = lift_tf_values(&norm_a, &pts);
    let g_tail = dw.green.tail_bound(GreenEvaluator::DEFAULT_DEPTH);

    // Gauss-point escape coefficients of the base map at its bad primes:
    // the content valuations extracted along a step-normalized iteration
    // play the role of the digit losses in the pointwise escape.
    let mut s_steps: BTreeMap<u64, Vec<Rat>> = BTreeMap::new();
    let mut depth_reached = 0u32;
    if !dw.bad_primes.is_empty() {
        let mut cur = dw.norm.clone();
        let mut partial: BTreeMap<u64, Rat> = dw.bad_primes.iter().map(|&p| (p, Rat::zero())).collect();
        for &p in &dw.bad_primes {
            s_steps.insert(p, vec![Rat::zero()]);
        }
        for k in 2..=n_max {
            let raw = match dw.norm.compose(&cur, &budget) {
                Ok(r) => r,
                Err(Error::BudgetExceeded { .. }) => break,
                Err(err) => return Err(err),
            };
            for &p in &dw.bad_primes {
                let ek = min_pair_valuation(&raw, p);
                let acc = partial.get_mut(&p).expect("seeded");
                *acc += Rat::new(BigInt::from(ek), BigInt::from(d).pow(k));
                s_steps.get_mut(&p).expect("seeded").push(acc.clone());
            }
            cur = normalize_content(&raw);
            depth_reached = k;
        }
    }

    let mut rows = Vec::new();
    for n in 1..=n_max {
        let form = divisor_fn_eq_a(f, a, n, &budget)?;
        let z = ZerosDivisor::new(form)?;
        let report = match height_prepared(&z, "green scan", &pw) {
            Ok(r) => Some(r),
            Err(Error::Unsupported(_)) => None,
            Err(err) => return Err(err),
        };
        let deg_n = (d as f64).powi(n as i32) + e as f64;

        // Archimedean integrand, one value per equilibrium sample.
        let mut mean = Kahan::new();
        let mut sq = Kahan::new();
        for (i, steps) in ladder.iter().enumerate() {
            let mut t_n = 0.0;
            for &s in steps.iter().take(n as usize) {
                t_n = df * t_n + s;
            }
            let val = (t_n + ta[i]) / deg_n - gvals[i];
            mean.add(val);
            sq.add(val * val);
        }
        let mf = m as f64;
        let avg = mean.total() / mf;
        let var = (sq.total() / mf - avg * avg).max(0.0);
        let mut bound = avg;
        let mut bound_err = 2.0 * (var / mf).sqrt() + g_tail + 1e-13 * (n as f64 + 1.0);

        // Finite places: T of the content-normalized lifts vanishes at the
        // Gauss point, leaving the base map's Gauss escape value, enclosed
        // between its truncation and the geometric tail.
        for &p in &dw.bad_primes {
            let lnp = (p as f64).ln();
            let steps = &s_steps[&p];
            let mn = (n.min(depth_reached.max(1)) as usize).min(steps.len()) - 1;
            let s_low = rat_to_f64(&steps[mn]);
            let tail_n = if (mn as u32 + 1) >= n {
                0.0
            } else {
                dw.vres(p) as f64 / ((df - 1.0) * df.powi(mn as i32 + 1))
            };
            let tail_full = dw.vres(p) as f64
                / ((df - 1.0) * df.powi(depth_reached.max(1) as i32));
            let kappa = df.powi(n as i32) / deg_n;
            let s_inf = rat_to_f64(steps.last().expect("nonempty"));
            // Enclosure of ln p * (S_inf - S_n * d^n / deg_n).
            let lo = lnp * (s_inf - (s_low + tail_n) * kappa);
            let hi = lnp * (s_inf + tail_full - s_low * kappa);
            bound += 0.5 * (lo + hi);
            bound_err += 0.5 * (hi - lo).abs();
        }

        rows.push(SmallnessRow {
            n,
            degree: z.degree(),
            height: report.as_ref().map(|r| r.total),
            height_error: report.as_ref().map(|r| r.total_error),
            bound,
            bound_error: bound_err,
            scaled_height: report.as_ref().map(|r| deg_n * r.total),
            scaled_bound: deg_n * bound,
        });
    }
    Ok(rows)
}

/// Smallest valuation over all coefficients of both forms; the exact
/// p-content exponent of an integer lift.
fn min_pair_valuation(l: &MapLift, p: u64) -> i64 {
    let pp = BigUint::from(p);
    l.coeffs()
        .filter(|c| !c.is_zero())
        .map(|c| valuation(c, &pp))
        .min()
        .unwrap_or(0)
}

/// `ln||(A0(u), A1(u))||` at unit representatives, any degree. Used for the
/// target map of a scan, which may have degree 0 or 1.
fn lift_tf_values(l: &MapLift, pts: &[PPoint]) -> Vec<f64> {
    use num::complex::Complex64;
    let d = l.deg();
    let c0: Vec<Complex64> = l.f0().coeffs().iter().map(|c| Complex64::new(rat_to_f64(c), 0.0)).collect();
    let c1: Vec<Complex64> = l.f1().coeffs().iter().map(|c| Complex64::new(rat_to_f64(c), 0.0)).collect();
    pts.iter()
        .map(|p| {
            let mut pow0 = vec![Complex64::new(1.0, 0.0); d + 1];
            let mut pow1 = pow0.clone();
            for k in 1..=d {
                pow0[k] = pow0[k - 1] * p.c0();
                pow1[k] = pow1[k - 1] * p.c1();
            }
            let mut v0 = Complex64::new(0.0, 0.0);
            let mut v1 = v0;
            for k in 0..=d {
                v0 += c0[k] * pow0[d - k] * pow1[k];
                v1 += c1[k] * pow0[d - k] * pow1[k];
            }
            0.5 * (v0.norm_sqr() + v1.norm_sqr()).ln()
        })
        .collect()
}
