//! Cross-checks of the smeared pair-energy inequalities on a corpus of
//! divisor/weight pairs: the archimedean regularization envelope and its
//! measured constant, the global chain combining all places against the
//! weighted height, negativity of normalized smeared energies, the
//! Cauchy-Schwarz style discrepancy bound for test functions, and the exact
//! p-adic counterpart of the smearing lemma.

use num::{BigInt, Signed, Zero};
use serde::Serialize;

use crate::arch::fekete::fekete_sum;
use crate::arch::green::equilibrium_sample;
use crate::arch::point::{self, PPoint};
use crate::arch::regularize::{regularized_fekete, C_XI};
use crate::arch::roots::roots_of_divisor;
use crate::error::Error;
use crate::exact::parse::{parse_map, parse_uni};
use crate::exact::{Rat, ZerosDivisor};
use crate::experiments::testfns::TestFn;
use crate::heights::{height_prepared, prepare, AdelicWeight, PreparedWeight};
use crate::nonarch::fekete_p::support_as_skeleton;
use crate::nonarch::{
    close_under_joins, median, radius_exp_below, rational_support, SkeletonPoint, SupportPoint,
    TreeFunction,
};
use crate::util::{substream, Kahan};
use crate::Result;
use rand::{Rng, RngCore};

/// One divisor/weight pair the suite runs over.
pub struct SuiteCase {
    pub label: String,
    pub divisor: ZerosDivisor,
    pub weight: AdelicWeight,
}

impl SuiteCase {
    pub fn new(label: impl Into<String>, divisor: ZerosDivisor, weight: AdelicWeight) -> Self {
        SuiteCase {
            label: label.into(),
            divisor,
            weight,
        }
    }
}

/// A mixed corpus: split and multiple supports, trivial and dynamical
/// weights, one weight with a bad prime, one divisor with irrational
/// support (which the p-adic rows skip by design).
pub fn default_corpus() -> Result<Vec<SuiteCase>> {
    let div = |src: &str| -> Result<ZerosDivisor> { ZerosDivisor::from_poly(&parse_uni(src)?) };
    let sq = parse_map("z^2")?;
    let basilica = parse_map("z^2 - 2")?;
    let doubled = parse_map("p0^2 ; 2 p1^2")?;
    Ok(vec![
        SuiteCase::new("pm-one/trivial", div("z^2 - 1")?, AdelicWeight::Trivial),
        SuiteCase::new(
            "pm-one/square",
            div("z^2 - 1")?,
            AdelicWeight::DynamicalGreen(sq.clone()),
        ),
        SuiteCase::new(
            "pm-one/cheby",
            div("z^2 - 1")?,
            AdelicWeight::DynamicalGreen(basilica),
        ),
        SuiteCase::new(
            "three-torsion/square",
            div("z^3 - z")?,
            AdelicWeight::DynamicalGreen(sq.clone()),
        ),
        SuiteCase::new(
            "half-integral/trivial",
            div("2 z^2 - 3 z + 1")?,
            AdelicWeight::Trivial,
        ),
        SuiteCase::new(
            "sqrt-two/square",
            div("z^2 - 2")?,
            AdelicWeight::DynamicalGreen(sq),
        ),
        SuiteCase::new(
            "pm-one/doubled-square",
            div("z^2 - 1")?,
            AdelicWeight::DynamicalGreen(doubled),
        ),
    ])
}

/// Archimedean smearing envelope at one radius: the measured constant
/// `c_instance` satisfies `smeared >= bare + corrections + diag * (ln eps +
/// c)` exactly when `c <= c_instance`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalRegRow {
    pub label: String,
    pub eps: f64,
    /// Full smeared pair energy, diagonal included.
    pub lhs: f64,
    /// Exact energy plus infinity and weight corrections, the `ln eps`
    /// diagonal term, and the smoothness allowance; everything except the
    /// absolute-constant term.
    pub rhs_without_constant: f64,
    pub c_instance: f64,
    pub error: f64,
    /// Whether `c_instance` clears the diagonal self-energy constant of the
    /// smearing profile, the value it converges to from above.
    pub holds: bool,
}

/// Global chain at one radius: archimedean smeared energy against the
/// height-side lower bound with every place's allowance subtracted.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GlobalRegRow {
    pub label: String,
    pub eps: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub error: f64,
    /// Number of places entering the chain (archimedean plus bad primes).
    pub places: usize,
    pub holds: bool,
}

/// Smeared energy of a divisor under a normalized dynamical weight; never
/// positive.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NegativityRow {
    pub label: String,
    pub eps: f64,
    pub energy: f64,
    pub error: f64,
    pub holds: bool,
}

/// Discrepancy of a test function between the divisor and the equilibrium
/// measure, against the smeared-energy Cauchy-Schwarz bound.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SchwarzRow {
    pub label: String,
    pub test_fn: String,
    pub eps: f64,
    /// |integral of the function against divisor minus degree times
    /// equilibrium|, Monte-Carlo on the equilibrium side.
    pub lhs: f64,
    /// `deg * Lip * eps + sqrt(Dirichlet) * sqrt(-smeared energy)`.
    pub rhs: f64,
    pub mc_error: f64,
    pub holds: bool,
}

/// Exactness record of the p-adic smearing at radius `p^eps_exp`: projecting
/// every support point to its radius-`eps` disk leaves separated pairings
/// untouched and sets each self-pairing to exactly `eps_exp`, so the
/// diagonal constant of the archimedean lemma is exactly zero here.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PadicRegRow {
    pub label: String,
    pub p: u64,
    pub eps: f64,
    /// Largest integer with `p^eps_exp <= eps`, the realized radius.
    pub eps_exp: i64,
    /// Pairs strictly closer than the realized radius; only these gain
    /// energy under projection.
    pub close_pairs: usize,
    /// `smeared - (exact off-diagonal + diagonal * eps_exp)` in units of
    /// `ln p`, an exact rational; zero when no pair is close.
    pub excess: String,
    /// Self-pairings all equal `eps_exp` and separated pairs are unchanged,
    /// both as exact rational identities.
    pub c_term_zero: bool,
    pub holds: bool,
}

/// Everything the suite measured, with the per-family rows and the verdict.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    /// Minimum over all archimedean rows of `c_instance`: the measured
    /// envelope of the admissible diagonal constant.
    pub c_meas: f64,
    pub c_meas_error: f64,
    pub local: Vec<LocalRegRow>,
    pub global: Vec<GlobalRegRow>,
    pub negativity: Vec<NegativityRow>,
    pub schwarz: Vec<SchwarzRow>,
    pub padic: Vec<PadicRegRow>,
    pub all_hold: bool,
}

/// Equilibrium sample size behind each Cauchy-Schwarz row.
const SCHWARZ_SAMPLES: usize = 4000;

/// Negativity is asserted up to this absolute tolerance; measured energies
/// sit far below it, on the scale of `diag * ln eps`.
const NEGATIVITY_TOL: f64 = 1e-9;

/// Finite primes every rational-support divisor is checked at, in addition
/// to the weight's bad primes.
const BASE_PRIMES: [u64; 2] = [2, 3];

struct CasePrep {
    label: String,
    pw: PreparedWeight,
    deg: f64,
    diag: f64,
    /// Per radius: (eps, smeared energy, its error).
    reg: Vec<(f64, f64, f64)>,
    max_local_err: f64,
}

/// Runs every family of checks over the corpus at each smearing radius.
///
/// Radii must lie in `(0, 1/2]`: larger ones leave the regime where the
/// affine smearing profile and its chart logic are meaningful. The global
/// rows reuse the measured archimedean constant, clamped to zero so the
/// check is at least as strong as with any admissible constant; finite
/// places enter with their smoothness allowance dropped, which again only
/// strengthens the verified inequality.
pub fn regularized_inequality_suite(
    corpus: &[SuiteCase],
    eps_grid: &[f64],
    seed: u64,
) -> Result<SuiteReport> {
    if corpus.is_empty() {
        return Err(Error::degenerate("empty corpus"));
    }
    if eps_grid.is_empty() {
        return Err(Error::degenerate("empty radius grid"));
    }
    for &eps in eps_grid {
        if !(eps > 0.0 && eps <= 0.5) || !eps.is_finite() {
            return Err(Error::degenerate(format!(
                "smearing radius {eps} outside (0, 1/2]"
            )));
        }
    }

    let mut local = Vec::new();
    let mut negativity = Vec::new();
    let mut schwarz = Vec::new();
    let mut padic = Vec::new();
    let mut preps: Vec<CasePrep> = Vec::new();
    let mut c_meas = f64::INFINITY;
    let mut c_meas_error = 0.0;

    for (ci, case) in corpus.iter().enumerate() {
        let pw = prepare(&case.weight)?;
        let cloud = roots_of_divisor(&case.divisor, 1e-7)?;
        let deg = case.divisor.degree() as f64;
        let diag = case.divisor.diagonal() as f64;
        let g = &pw.arch;
        let (h_exp, h_const) = g.holder();
        let max_mult = cloud.points().iter().map(|(_, m)| *m).max().unwrap_or(1) as f64;

        let (bare, bare_err) = fekete_sum(&cloud, g);
        let mut inf_corr = Kahan::new();
        let mut g_corr = Kahan::new();
        for (w, m) in cloud.points() {
            let m2 = (*m as f64) * (*m as f64);
            if !w.is_infinity() {
                inf_corr.add(2.0 * m2 * point::ln_chordal(w, &PPoint::infinity()));
            }
            g_corr.add(2.0 * m2 * g.eval(w));
        }
        // Root positions move every correction term; the kernel slope is
        // bounded by the inverse chordal gap to infinity and the weight by
        // its fitted modulus. Generous first-order envelope.
        let corr_err =
            2.0 * max_mult * (4.0 + h_const) * cloud.position_error_sum()
                + 2.0 * diag * g.eval_err();

        let mut reg = Vec::with_capacity(eps_grid.len());
        let mut max_local_err: f64 = 0.0;
        for &eps in eps_grid {
            let (lhs, lhs_err) = regularized_fekete(&cloud, g, eps);
            let eta = h_const * eps.powf(h_exp);
            let rhs0 = bare + diag * eps.ln() + inf_corr.total() - g_corr.total()
                - (2.0 * eps + 2.0 * eta) * deg * deg;
            let c_instance = (lhs - rhs0) / diag;
            let error = (lhs_err + bare_err + corr_err) / diag + 1e-12;
            max_local_err = max_local_err.max(error);
            if c_instance - error < c_meas {
                c_meas = c_meas.min(c_instance);
                c_meas_error = error;
            }
            local.push(LocalRegRow {
                label: case.label.clone(),
                eps,
                lhs,
                rhs_without_constant: rhs0,
                c_instance,
                error,
                holds: c_instance >= C_XI - error,
            });
            if pw.dynamical.is_some() {
                negativity.push(NegativityRow {
                    label: case.label.clone(),
                    eps,
                    energy: lhs,
                    error: lhs_err,
                    holds: lhs <= NEGATIVITY_TOL,
                });
            }
            reg.push((eps, lhs, lhs_err));
        }

        if let Some(dw) = &pw.dynamical {
            let s = substream(seed, 0x73756974, ci as u64).next_u64();
            let samples = equilibrium_sample(&dw.norm, SCHWARZ_SAMPLES, s)?;
            for t in TestFn::catalog() {
                let mut root_side = Kahan::new();
                for (w, m) in cloud.points() {
                    root_side.add(*m as f64 * t.eval(w));
                }
                let (mean, sd) = mean_sd(samples.iter().map(|p| t.eval(p)));
                let lhs = (root_side.total() - deg * mean).abs();
                let mc_error = deg * sd / (samples.len() as f64).sqrt();
                let pos_err = t.lip() * cloud.position_error_sum();
                for &(eps, energy, energy_err) in &reg {
                    let defect = (-energy).max(0.0) + energy_err;
                    let rhs = deg * t.lip() * eps + t.dirichlet().sqrt() * defect.sqrt();
                    schwarz.push(SchwarzRow {
                        label: case.label.clone(),
                        test_fn: t.label().to_string(),
                        eps,
                        lhs,
                        rhs,
                        mc_error,
                        holds: lhs <= rhs + 3.0 * mc_error + pos_err,
                    });
                }
            }
        }

        let bad_primes: Vec<u64> = pw
            .dynamical
            .as_ref()
            .map(|dw| dw.bad_primes.clone())
            .unwrap_or_default();
        padic.extend(padic_rows(case, &bad_primes, eps_grid)?);

        preps.push(CasePrep {
            label: case.label.clone(),
            pw,
            deg,
            diag,
            reg,
            max_local_err,
        });
    }

    // The global rows need the finished measured constant, so they run in a
    // second pass over the cached per-case data.
    let c_use = c_meas.min(0.0);
    let mut global = Vec::new();
    for (case, prep) in corpus.iter().zip(&preps) {
        let Some(dw) = &prep.pw.dynamical else {
            continue;
        };
        let report = height_prepared(&case.divisor, &prep.label, &prep.pw)?;
        let places = 1 + dw.bad_primes.len();
        let (h_exp, h_const) = prep.pw.arch.holder();
        for &(eps, lhs, lhs_err) in &prep.reg {
            let allowance = places as f64 * eps + h_const * eps.powf(h_exp);
            let rhs = -2.0 * prep.deg * prep.deg * report.total
                + (c_use + eps.ln()) * prep.diag * places as f64
                - 2.0 * prep.deg * prep.deg * allowance;
            let slack = lhs - rhs;
            let error = lhs_err
                + 2.0 * prep.deg * prep.deg * report.total_error
                + prep.diag * places as f64 * prep.max_local_err;
            global.push(GlobalRegRow {
                label: prep.label.clone(),
                eps,
                lhs,
                rhs,
                slack,
                error,
                places,
                holds: slack >= -error,
            });
        }
    }

    let all_hold = c_meas <= 0.0
        && local.iter().all(|r| r.holds)
        && global.iter().all(|r| r.holds)
        && negativity.iter().all(|r| r.holds)
        && schwarz.iter().all(|r| r.holds)
        && padic.iter().all(|r| r.holds);
    Ok(SuiteReport {
        c_meas,
        c_meas_error,
        local,
        global,
        negativity,
        schwarz,
        padic,
        all_hold,
    })
}

/// Exact p-adic smearing rows for one case; empty when the divisor has
/// irrational or infinite support, which the exact machinery cannot project.
fn padic_rows(case: &SuiteCase, bad_primes: &[u64], eps_grid: &[f64]) -> Result<Vec<PadicRegRow>> {
    let support = match rational_support(&case.divisor) {
        Ok(s) => s,
        Err(Error::Unsupported(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    if support
        .iter()
        .any(|(s, _)| matches!(s, SupportPoint::Infinity))
    {
        return Ok(Vec::new());
    }
    let mut primes: Vec<u64> = BASE_PRIMES.to_vec();
    for &p in bad_primes {
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    primes.sort_unstable();

    let mut rows = Vec::new();
    for &p in &primes {
        let classical: Vec<(SkeletonPoint, u32)> = support
            .iter()
            .map(|(s, m)| Ok((support_as_skeleton(s, p)?, *m)))
            .collect::<Result<_>>()?;
        for &eps in eps_grid {
            let k = radius_exp_below(p, eps);
            let k_rat = Rat::from_integer(BigInt::from(k));
            let smeared: Vec<SkeletonPoint> = classical
                .iter()
                .map(|(s, _)| s.pi_eps(&k_rat))
                .collect();

            let mut c_term_zero = true;
            for q in &smeared {
                if q.hsia_affine_exp(q) != Some(k_rat.clone()) {
                    c_term_zero = false;
                }
            }
            let mut excess = Rat::zero();
            let mut close_pairs = 0usize;
            for i in 0..classical.len() {
                for j in (i + 1)..classical.len() {
                    let exact = classical[i]
                        .0
                        .hsia_affine_exp(&classical[j].0)
                        .ok_or_else(|| {
                            Error::degenerate("support points must be pairwise distinct")
                        })?;
                    let smear = smeared[i]
                        .hsia_affine_exp(&smeared[j])
                        .expect("disks join to a disk");
                    if exact < k_rat {
                        close_pairs += 1;
                    } else if smear != exact {
                        c_term_zero = false;
                    }
                    // Unordered pair, so twice the multiplicity product.
                    let mm = Rat::from_integer(BigInt::from(
                        2 * classical[i].1 as u64 * classical[j].1 as u64,
                    ));
                    excess += mm * (&smear - &exact);
                }
            }
            let holds = c_term_zero && !excess.is_negative();
            rows.push(PadicRegRow {
                label: case.label.clone(),
                p,
                eps,
                eps_exp: k,
                close_pairs,
                excess: excess.to_string(),
                c_term_zero,
                holds,
            });
        }
    }
    Ok(rows)
}

/// Outcome of randomized exact tree checks: the energy Cauchy-Schwarz
/// inequality for random tree functions against random mass-zero measures,
/// and the Gromov-product form of the normalized kernel on every disk pair.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CsSuiteReport {
    pub instances: usize,
    pub cs_checked: usize,
    pub pairs_checked: usize,
    pub cs_violations: usize,
    pub gromov_violations: usize,
    pub all_hold: bool,
}

/// Randomized instances over the primes 2, 3, 5, 7: a join-closed disk pool
/// with rational centers (spread across valuations) and rational diameter
/// exponents, random rational node values, and a random mass-zero measure.
/// Everything is exact rational arithmetic, so a violation would be a real
/// counterexample rather than rounding noise.
pub fn cs_random_suite(instances: usize, seed: u64) -> Result<CsSuiteReport> {
    if instances == 0 {
        return Err(Error::degenerate("the check needs at least one instance"));
    }
    let mut cs_checked = 0usize;
    let mut pairs_checked = 0usize;
    let mut cs_violations = 0usize;
    let mut gromov_violations = 0usize;
    for i in 0..instances {
        let mut rng = substream(seed, 0x63735f74726565, i as u64);
        let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let mut pts = vec![SkeletonPoint::gauss(p)];
        for _ in 0..rng.gen_range(3..=6) {
            let center = Rat::new(
                rng.gen_range(-20i64..=20).into(),
                rng.gen_range(1i64..=6).into(),
            ) * Rat::from_integer(BigInt::from(p)).pow(rng.gen_range(-2i32..=2));
            let rexp = Rat::new(
                rng.gen_range(-6i64..=6).into(),
                rng.gen_range(1i64..=3).into(),
            );
            pts.push(SkeletonPoint::disk(p, center, rexp));
        }
        // Random centers can collide; keep one description per disk so the
        // random values below cannot conflict on a shared node.
        let mut nodes: Vec<SkeletonPoint> = Vec::new();
        for s in close_under_joins(pts) {
            if !nodes.iter().any(|q| q.same_point(&s)) {
                nodes.push(s);
            }
        }

        let gauss = SkeletonPoint::gauss(p);
        for a in 0..nodes.len() {
            for b in (a + 1)..nodes.len() {
                let lhs = nodes[a].hsia_can_exp(&nodes[b]);
                let m = median(&nodes[a], &nodes[b], &gauss);
                let rhs = -m.rho_exp(&gauss)?;
                if lhs != Some(rhs) {
                    gromov_violations += 1;
                }
                pairs_checked += 1;
            }
        }

        if nodes.len() < 2 {
            continue;
        }
        let entries: Vec<(SkeletonPoint, Rat)> = nodes
            .iter()
            .map(|s| {
                let v = Rat::new(
                    rng.gen_range(-9i64..=9).into(),
                    rng.gen_range(1i64..=4).into(),
                );
                (s.clone(), v)
            })
            .collect();
        let tree = TreeFunction::new(entries)?;
        let k = rng.gen_range(2..=nodes.len().min(4));
        let mut idx: Vec<usize> = Vec::with_capacity(k);
        while idx.len() < k {
            let j = rng.gen_range(0..nodes.len());
            if !idx.contains(&j) {
                idx.push(j);
            }
        }
        let mut nu: Vec<(usize, Rat)> = Vec::with_capacity(k);
        let mut balance = Rat::zero();
        for &j in idx.iter().take(k - 1) {
            let mass = Rat::new(
                rng.gen_range(-5i64..=5).into(),
                rng.gen_range(1i64..=3).into(),
            );
            balance += &mass;
            nu.push((j, mass));
        }
        nu.push((idx[k - 1], -balance));
        let (lhs, rhs) = tree.cauchy_schwarz_check(&nu)?;
        if lhs > rhs {
            cs_violations += 1;
        }
        cs_checked += 1;
    }
    Ok(CsSuiteReport {
        instances,
        cs_checked,
        pairs_checked,
        cs_violations,
        gromov_violations,
        all_hold: cs_violations == 0 && gromov_violations == 0,
    })
}

fn mean_sd(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let vs: Vec<f64> = values.collect();
    let mut acc = Kahan::new();
    for v in &vs {
        acc.add(*v);
    }
    let mean = acc.total() / vs.len() as f64;
    let mut var = Kahan::new();
    for v in &vs {
        var.add((v - mean) * (v - mean));
    }
    let sd = if vs.len() > 1 {
        (var.total() / (vs.len() as f64 - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}
