//! Scans over iteration order: multiplicity diagonals of periodic-point
//! divisors, chordal proximity of orbits to a target map, and a pointwise
//! check of the Riesz-type decomposition of `ln [f^n(z), a(z)]` into
//! potentials against the equilibrium measure.

use num::complex::Complex64;
use serde::Serialize;

use crate::arch::green::{equilibrium_sample, GreenEvaluator};
use crate::arch::point::{self, PPoint};
use crate::arch::roots::roots_of_divisor;
use crate::error::Error;
use crate::exact::{divisor_fn_eq_a, BinaryForm, CoeffBudget, MapLift, ZerosDivisor};
use crate::heights::AdelicWeight;
use crate::util::{rat_to_f64, substream, Kahan};
use crate::Result;
use rand::RngCore;

/// Degree and diagonal of `[f^n = Id]` for one `n`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagRow {
    pub n: u32,
    pub degree: u64,
    /// Sum of squared multiplicities, exact.
    pub diagonal: u64,
    /// `diagonal / degree^2`; decay witnesses that no single periodic point
    /// carries a positive fraction of the degree.
    pub normalized: f64,
}

/// Exact multiplicity diagonals of the periodic-point divisors of `f` for
/// `n` in `[n_lo, n_hi]`. Orders where `f^n` is the identity are skipped.
pub fn periodic_diag_scan(
    f: &MapLift,
    n_lo: u32,
    n_hi: u32,
    budget: &CoeffBudget,
) -> Result<Vec<DiagRow>> {
    if n_lo < 1 || n_hi < n_lo {
        return Err(Error::degenerate("empty iteration range"));
    }
    let id = MapLift::identity();
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let z = match divisor_fn_eq_a(f, &id, n, budget) {
            Ok(form) => ZerosDivisor::new(form)?,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let degree = z.degree() as u64;
        let diagonal = u64::try_from(z.diagonal())
            .map_err(|_| Error::unsupported("diagonal exceeds the reporting range"))?;
        rows.push(DiagRow {
            n,
            degree,
            diagonal,
            normalized: diagonal as f64 / (degree as f64 * degree as f64),
        });
    }
    Ok(rows)
}

/// Floating-point evaluator for the pair of forms of a lift, for pointwise
/// application where exact arithmetic is not needed (targets of a proximity
/// scan, Moebius images). Iteration of the dynamical map itself goes through
/// [`GreenEvaluator::apply`], which renormalizes at every step.
struct PairEval {
    deg: usize,
    terms0: Vec<(usize, Complex64)>,
    terms1: Vec<(usize, Complex64)>,
}

impl PairEval {
    fn new(m: &MapLift) -> Self {
        let grab = |form: &BinaryForm| {
            form.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !num::Zero::is_zero(*c))
                .map(|(k, c)| (k, Complex64::new(rat_to_f64(c), 0.0)))
                .collect()
        };
        PairEval {
            deg: m.deg(),
            terms0: grab(m.f0()),
            terms1: grab(m.f1()),
        }
    }

    fn apply(&self, p: &PPoint) -> Result<PPoint> {
        let mut pow0 = vec![Complex64::new(1.0, 0.0)];
        let mut pow1 = vec![Complex64::new(1.0, 0.0)];
        for k in 1..=self.deg {
            pow0.push(pow0[k - 1] * p.c0());
            pow1.push(pow1[k - 1] * p.c1());
        }
        let horner = |terms: &[(usize, Complex64)]| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, c) in terms {
                acc += c * pow0[self.deg - k] * pow1[*k];
            }
            acc
        };
        PPoint::new(horner(&self.terms0), horner(&self.terms1))
    }
}

/// Deterministic golden-angle spiral filling the affine disk around `center`.
fn spiral(center: Complex64, radius: f64, count: usize) -> Vec<Complex64> {
    const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
    (0..count)
        .map(|j| {
            let r = radius * ((j as f64 + 0.5) / count as f64).sqrt();
            center + Complex64::from_polar(r, GOLDEN_ANGLE * j as f64)
        })
        .collect()
}

/// Supremum over a disk of the log chordal proximity of `f^n` to `a`, one `n`
/// per row.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProximityRow {
    pub n: u32,
    pub degree: u64,
    pub diagonal: u64,
    /// `sup ln [f^n(z), a(z)]` over the scanned disk; nonpositive because the
    /// chordal kernel is at most 1.
    pub sup_log_proximity: f64,
    /// `sqrt(n * degree)`, the growth scale the supremum is compared against.
    pub budget: f64,
}

/// Scans the affine disk `|z - center| <= radius` for the point where the
/// orbit `f^n(z)` stays chordally farthest from `a(z)`, for each `n` in
/// `[n_lo, n_hi]`.
///
/// A coarse golden-angle grid of `grid_size` points is sharpened by two local
/// search rounds around the running best point, clamped to the disk; the
/// reported supremum is a certified lower bound of the true one (never an
/// overestimate), which is the safe side for the upper bounds it feeds.
/// Orders where `f^n` coincides with `a` are skipped.
pub fn proximity_scan(
    f: &MapLift,
    a: &MapLift,
    center: Complex64,
    radius: f64,
    n_lo: u32,
    n_hi: u32,
    grid_size: usize,
) -> Result<Vec<ProximityRow>> {
    if n_lo < 1 || n_hi < n_lo {
        return Err(Error::degenerate("empty iteration range"));
    }
    if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
        return Err(Error::degenerate("scan disk must be finite"));
    }
    let grid_size = grid_size.max(16);
    let ev = GreenEvaluator::new(f, GreenEvaluator::DEFAULT_DEPTH)?;
    let aev = PairEval::new(a);
    let budget_cfg = CoeffBudget::default();
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let z = match divisor_fn_eq_a(f, a, n, &budget_cfg) {
            Ok(form) => ZerosDivisor::new(form)?,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let degree = z.degree() as u64;
        let diagonal = u64::try_from(z.diagonal())
            .map_err(|_| Error::unsupported("diagonal exceeds the reporting range"))?;

        let value_at = |w: Complex64| -> Option<f64> {
            let p = PPoint::from_affine(w);
            let mut q = p.clone();
            for _ in 0..n {
                q = ev.apply(&q).ok()?;
            }
            let target = aev.apply(&p).ok()?;
            Some(point::ln_chordal(&q, &target))
        };

        // Coarse pass over the disk, then two local rounds around the
        // running best point; the coarse spacing is about radius/sqrt(grid)
        // and each round shrinks the search scale by the same factor.
        let mut best_v = f64::NEG_INFINITY;
        let mut best_z = center;
        let mut batch = spiral(center, radius, grid_size);
        let mut local = 4.0 * radius / (grid_size as f64).sqrt();
        for round in 0..3 {
            if round > 0 {
                batch = spiral(best_z, local, grid_size)
                    .into_iter()
                    .map(|w| {
                        let off = w - center;
                        if off.norm() > radius {
                            center + off / off.norm() * radius
                        } else {
                            w
                        }
                    })
                    .collect();
                local *= 4.0 / (grid_size as f64).sqrt();
            }
            for &w in &batch {
                if let Some(v) = value_at(w) {
                    if v > best_v {
                        best_v = v;
                        best_z = w;
                    }
                }
            }
        }

        rows.push(ProximityRow {
            n,
            degree,
            diagonal,
            sup_log_proximity: best_v,
            budget: ((n as f64) * degree as f64).sqrt(),
        });
    }
    Ok(rows)
}

/// Outcome of one pointwise decomposition check; see [`riesz_residual`].
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RieszReport {
    pub n: u32,
    pub degree: u64,
    /// Largest |lhs - rhs| over the points that survived the filter.
    pub max_residual: f64,
    /// Three standard errors of the Monte-Carlo pieces plus the first-order
    /// deterministic error of roots and weight evaluations.
    pub error_bound: f64,
    pub points_used: usize,
    pub skipped: usize,
    pub mc_samples: usize,
}

/// Chordal distance below which a test point is too close to the divisor for
/// the two logarithmic singularities to cancel in floating point.
const RIESZ_FILTER: f64 = 0.05;

/// Checks pointwise that under the normalized dynamical weight of `f`,
///
/// `ln [f^n(z), a(z)] - g(f^n z) - g(a z)` equals
/// `U_{[f^n=a]}(z) - (deg) U_{mu}(z) - U_{a*mu}(z) + integral of the lhs`,
///
/// where every `U` is the potential `z -> sum or integral of
/// `ln [z, w] - g(z) - g(w)` against the named measure and `mu` is the
/// equilibrium measure of `f`. The integrals are Monte-Carlo estimates from
/// independent equilibrium samples, so the residual is reported together
/// with a three-standard-error bound.
///
/// Targets of degree 0 have `a*mu = 0` and the term drops exactly; degree 1
/// targets pull back through the inverse Moebius map. Higher degrees are
/// rejected as unsupported.
pub fn riesz_residual(
    f: &MapLift,
    a: &MapLift,
    n: u32,
    points: &[PPoint],
    mc_samples: usize,
    seed: u64,
) -> Result<RieszReport> {
    if a.deg() >= 2 {
        return Err(Error::unsupported(
            "equilibrium pullback is implemented for targets of degree at most 1",
        ));
    }
    if n < 1 {
        return Err(Error::degenerate("iteration order must be at least 1"));
    }
    let m = mc_samples.max(16);
    let pw = crate::heights::prepare(&AdelicWeight::DynamicalGreen(f.clone()))?;
    let dw = pw
        .dynamical
        .as_ref()
        .expect("dynamical weight always prepares its Green data");
    let g = &pw.arch;

    let budget = CoeffBudget::default();
    let z = ZerosDivisor::new(divisor_fn_eq_a(f, a, n, &budget)?)?;
    let degree = z.degree();
    let cloud = roots_of_divisor(&z, 1e-7)?;
    let aev = PairEval::new(a);

    // Inverse of a degree-1 target, as the adjugate of its coefficient
    // matrix; `None` for constant targets, whose pullback measure is zero.
    let a_inverse = if a.deg() == 1 {
        let c = |form: &BinaryForm, k: usize| rat_to_f64(&form.coeffs()[k]);
        let (al, be) = (c(a.f0(), 0), c(a.f0(), 1));
        let (ga, de) = (c(a.f1(), 0), c(a.f1(), 1));
        Some(move |s: &PPoint| {
            PPoint::new(de * s.c0() - be * s.c1(), -ga * s.c0() + al * s.c1())
        })
    } else {
        None
    };

    let draw = |idx: u64| -> Result<Vec<PPoint>> {
        let s = substream(seed, 0x72696573, idx).next_u64();
        equilibrium_sample(&dw.norm, m, s)
    };
    let s_mu = draw(0)?;
    let s_pull = if a_inverse.is_some() {
        Some(draw(1)?)
    } else {
        None
    };
    let s_const = draw(2)?;

    let phi = |x: &PPoint, y: &PPoint| point::ln_chordal(x, y) - g.eval(x) - g.eval(y);
    let lhs_at = |p: &PPoint| -> Result<f64> {
        let mut q = p.clone();
        for _ in 0..n {
            q = dw.green.apply(&q)?;
        }
        let t = aev.apply(p)?;
        Ok(phi(&q, &t))
    };

    // The constant term, integral of the lhs against the equilibrium measure.
    let (c_hat, c_se) = mean_and_se(s_const.iter().filter_map(|s| lhs_at(s).ok()));

    let mut max_residual: f64 = 0.0;
    let mut max_se: f64 = 0.0;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for p in points {
        let near_divisor = cloud
            .points()
            .iter()
            .any(|(w, _)| point::chordal(p, w) < RIESZ_FILTER);
        let Ok(lhs) = lhs_at(p) else {
            skipped += 1;
            continue;
        };
        if near_divisor || !lhs.is_finite() {
            skipped += 1;
            continue;
        }

        let mut root_sum = Kahan::new();
        for (w, mult) in cloud.points() {
            root_sum.add(*mult as f64 * phi(p, w));
        }
        let (u_mu, u_mu_se) = mean_and_se(s_mu.iter().map(|s| phi(p, s)));
        let (u_pull, u_pull_se) = match (&a_inverse, &s_pull) {
            (Some(inv), Some(batch)) => {
                mean_and_se(batch.iter().filter_map(|s| Some(phi(p, &inv(s).ok()?))))
            }
            _ => (0.0, 0.0),
        };
        let rhs = root_sum.total() - degree as f64 * u_mu - u_pull + c_hat;
        let se = ((degree as f64 * u_mu_se).powi(2) + u_pull_se.powi(2) + c_se.powi(2)).sqrt();
        max_residual = max_residual.max((lhs - rhs).abs());
        max_se = max_se.max(se);
        used += 1;
    }
    if used == 0 {
        return Err(Error::degenerate(
            "every test point was filtered out or failed to evaluate",
        ));
    }

    let (_, holder_c) = g.holder();
    let det_err = cloud.position_error_sum() * (1.0 / RIESZ_FILTER + holder_c)
        + 4.0 * degree as f64 * g.eval_err()
        + 1e-11 * n as f64;
    Ok(RieszReport {
        n,
        degree: degree as u64,
        max_residual,
        error_bound: 3.0 * max_se + det_err,
        points_used: used,
        skipped,
        mc_samples: m,
    })
}

fn mean_and_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let vs: Vec<f64> = values.filter(|v| v.is_finite()).collect();
    if vs.is_empty() {
        return (0.0, f64::INFINITY);
    }
    let mut acc = Kahan::new();
    for v in &vs {
        acc.add(*v);
    }
    let mean = acc.total() / vs.len() as f64;
    let mut var = Kahan::new();
    for v in &vs {
        var.add((v - mean) * (v - mean));
    }
    let se = if vs.len() > 1 {
        (var.total() / (vs.len() as f64 - 1.0)).sqrt() / (vs.len() as f64).sqrt()
    } else {
        f64::INFINITY
    };
    (mean, se)
}
