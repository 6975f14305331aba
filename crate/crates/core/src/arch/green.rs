//! Escape-rate Green functions of polynomial map lifts, equilibrium-measure
//! sampling by backward iteration, and the pair-energy estimator.
//!
//! The only analytic fact used for error control is the uniform telescoping
//! bound: the depth-n partial sum of T-values differs from the limit by at
//! most sup|T_F| / (d^n (d-1)). sup|T_F| is estimated on a dense grid with a
//! safety factor, then cross-checked against a rigorous coefficient bound.

use crate::arch::fekete::WeightFn;
use crate::arch::point::{self, PPoint};
use crate::arch::roots::aberth;
use crate::error::Error;
use crate::exact::MapLift;
use crate::util::{ln_rat_abs, rat_to_f64, substream, Kahan};
use crate::Result;
use num::complex::Complex64;
use num::Zero;
use rand::Rng;

/// Floating-point view of a map lift, with everything needed to evaluate
/// its dynamical Green function at certified depth.
pub struct GreenEvaluator {
    d: usize,
    c0: Vec<f64>,
    c1: Vec<f64>,
    depth: u32,
    sup_tf: f64,
    sup_tf_exact: f64,
    ln_res_abs: f64,
    v_green: f64,
}

impl GreenEvaluator {
    /// Default iteration depth; the tail bound is then far below double
    /// roundoff for every degree >= 2.
    pub const DEFAULT_DEPTH: u32 = 64;

    pub fn new(lift: &MapLift, depth: u32) -> Result<Self> {
        let d = lift.deg();
        if d < 2 {
            return Err(Error::unsupported(
                "escape-rate potential needs a map of degree at least 2",
            ));
        }
        debug_assert!(!lift.resultant().is_zero());
        let c0: Vec<f64> = lift.f0().coeffs().iter().map(rat_to_f64).collect();
        let c1: Vec<f64> = lift.f1().coeffs().iter().map(rat_to_f64).collect();
        let ln_res_abs = ln_rat_abs(lift.resultant());
        let v_green = -ln_res_abs / (d as f64 * (d as f64 - 1.0));
        let mut g = GreenEvaluator {
            d,
            c0,
            c1,
            depth: depth.max(1),
            sup_tf: 0.0,
            sup_tf_exact: 0.0,
            ln_res_abs,
            v_green,
        };
        let (grid, exact) = g.estimate_sup_tf();
        g.sup_tf = grid;
        g.sup_tf_exact = exact;
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Grid-sampled sup|T_F| times a 1.25 safety factor. Always at most the
    /// rigorous coefficient bound (asserted at construction).
    pub fn sup_tf_bound(&self) -> f64 {
        self.sup_tf
    }

    /// The rigorous (loose) coefficient-and-resultant bound on sup|T_F|.
    pub fn sup_tf_coeff_bound(&self) -> f64 {
        self.sup_tf_exact
    }

    pub fn sup_tf_method(&self) -> &'static str {
        "grid-sample-1.25x"
    }

    /// Tail bound sup|T_F| / (d^n (d-1)) after n iterations.
    pub fn tail_bound(&self, n: u32) -> f64 {
        self.sup_tf / ((self.d as f64).powi(n as i32) * (self.d as f64 - 1.0))
    }

    /// Exact equilibrium energy value -ln|Res F| / (d(d-1)).
    pub fn v_green(&self) -> f64 {
        self.v_green
    }

    pub fn ln_res_abs(&self) -> f64 {
        self.ln_res_abs
    }

    fn eval_forms(&self, x0: Complex64, x1: Complex64) -> (Complex64, Complex64) {
        let d = self.d;
        let mut pow0 = vec![Complex64::new(1.0, 0.0); d + 1];
        let mut pow1 = vec![Complex64::new(1.0, 0.0); d + 1];
        for k in 1..=d {
            pow0[k] = pow0[k - 1] * x0;
            pow1[k] = pow1[k - 1] * x1;
        }
        let mut w0 = Complex64::new(0.0, 0.0);
        let mut w1 = Complex64::new(0.0, 0.0);
        for k in 0..=d {
            let basis = pow0[d - k] * pow1[k];
            if self.c0[k] != 0.0 {
                w0 += basis * self.c0[k];
            }
            if self.c1[k] != 0.0 {
                w1 += basis * self.c1[k];
            }
        }
        (w0, w1)
    }

    /// One application of the map, renormalized.
    pub fn apply(&self, p: &PPoint) -> Result<PPoint> {
        let (w0, w1) = self.eval_forms(p.c0(), p.c1());
        PPoint::new(w0, w1)
            .map_err(|_| Error::numeric("map image underflowed to the zero pair"))
    }

    /// T_F at the point: ln||F(u)|| - d ln||u||, independent of the chosen
    /// representative.
    pub fn t_f(&self, p: &PPoint) -> f64 {
        let (w0, w1) = self.eval_forms(p.c0(), p.c1());
        let n2 = w0.norm_sqr() + w1.norm_sqr();
        0.5 * n2.ln() - self.d as f64 * p.ln_norm()
    }

    /// Depth-n escape value T_{F^n}(p)/d^n via the telescoped sum of per-step
    /// T-values, with its certified tail bound.
    pub fn escape_at_depth(&self, p: &PPoint, n: u32) -> Result<(f64, f64)> {
        let mut acc = Kahan::new();
        let mut u = *p;
        let mut scale = 1.0 / self.d as f64;
        for _ in 0..n {
            acc.add(self.t_f(&u) * scale);
            u = self.apply(&u)?;
            scale /= self.d as f64;
        }
        Ok((acc.total(), self.tail_bound(n)))
    }

    /// Escape value at the evaluator's configured depth.
    pub fn escape(&self, p: &PPoint) -> Result<(f64, f64)> {
        self.escape_at_depth(p, self.depth)
    }

    /// The normalized dynamical weight g_F + V/2 packaged as a WeightFn.
    /// Its evaluation error is the telescoping tail at the configured depth.
    pub fn weight_fn(me: &std::sync::Arc<Self>, label: impl Into<String>) -> WeightFn {
        let own = me.clone();
        let err = me.tail_bound(me.depth) + 1e-14;
        WeightFn::new(label, err, move |p: &PPoint| {
            own.escape(p).map(|(v, _)| v).unwrap_or(f64::NAN) + own.v_green / 2.0
        })
    }

    /// Grid estimate of sup|T_F| (10^4 area-uniform points, 1.25 safety
    /// factor) plus the rigorous coefficient bound used as a cross-check.
    fn estimate_sup_tf(&self) -> (f64, f64) {
        let n = 10_000usize;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let mut raw: f64 = 0.0;
        for i in 0..n {
            let zc = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - zc * zc).max(0.0).sqrt();
            let phi = golden * i as f64;
            let (x, y) = (r * phi.cos(), r * phi.sin());
            // Riemann sphere to projective coordinates without pole trouble.
            let p = if zc <= 0.0 {
                PPoint::new(Complex64::new(1.0 - zc, 0.0), Complex64::new(x, y))
            } else {
                PPoint::new(Complex64::new(x, -y), Complex64::new(1.0 + zc, 0.0))
            }
            .expect("sphere point is nonzero");
            raw = raw.max(self.t_f(&p).abs());
        }

        // Rigorous cross-check: with B the largest coefficient modulus,
        //   T_F <= ln(sqrt2 * (d+1) B), and by the Sylvester cofactor
        //   identity Res*p_i^{2d-1} = u f0 + v f1 with ||(u,v)|| controlled
        //   by (2d-1)! B^{2d-1},
        //   T_F >= ln|Res| - (2d-1) ln B - ln(2d (2d-1)!) - (d/2) ln 2.
        let b = self
            .c0
            .iter()
            .chain(&self.c1)
            .fold(0.0f64, |m, c| m.max(c.abs()));
        let d = self.d as f64;
        let upper = (2f64.sqrt() * (d + 1.0) * b).ln();
        let mut fact = 1.0;
        for k in 2..(2 * self.d) {
            fact *= k as f64;
        }
        let lower_mag =
            -self.ln_res_abs + (2.0 * d - 1.0) * b.ln() + (2.0 * d * fact).ln() + d / 2.0 * 2f64.ln();
        let exact = upper.max(lower_mag).max(0.0);
        let grid = (raw * 1.25).max(1e-12);
        debug_assert!(
            raw <= exact + 1e-9,
            "grid sup {raw} exceeded the rigorous bound {exact}"
        );
        (grid.min(exact), exact)
    }
}

/// Seeded backward-orbit samples of the equilibrium measure. Each sample
/// walks its own substream, so results are independent of worker count and
/// stable under partial reruns.
pub fn equilibrium_sample(lift: &MapLift, count: usize, seed: u64) -> Result<Vec<PPoint>> {
    equilibrium_sample_depth(lift, count, seed, 32)
}

pub fn equilibrium_sample_depth(
    lift: &MapLift,
    count: usize,
    seed: u64,
    depth: u32,
) -> Result<Vec<PPoint>> {
    let d = lift.deg();
    if d < 2 {
        return Err(Error::unsupported("equilibrium sampling needs degree >= 2"));
    }
    if depth < 30 {
        return Err(Error::unsupported(
            "backward orbits shallower than 30 are not meaningful",
        ));
    }
    let c0: Vec<f64> = lift.f0().coeffs().iter().map(rat_to_f64).collect();
    let c1: Vec<f64> = lift.f1().coeffs().iter().map(rat_to_f64).collect();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = substream(seed, 0x657175696c, i as u64);
        // A fixed transcendental-looking start far from small cycles.
        let mut w = PPoint::from_affine(Complex64::new(
            std::f64::consts::E,
            std::f64::consts::FRAC_PI_4,
        ));
        for _ in 0..depth {
            w = random_preimage(&c0, &c1, d, &w, &mut rng)?;
        }
        out.push(w);
    }
    Ok(out)
}

/// Solves F(z) = w and picks one of the d preimages uniformly.
fn random_preimage(
    c0: &[f64],
    c1: &[f64],
    d: usize,
    w: &PPoint,
    rng: &mut impl Rng,
) -> Result<PPoint> {
    // Coefficients of f0(1,z) w1 - f1(1,z) w0 in the affine chart.
    let (w0, w1) = (w.c0(), w.c1());
    let mut cs: Vec<Complex64> = (0..=d).map(|k| w1 * c0[k] - w0 * c1[k]).collect();
    let top = cs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if top == 0.0 {
        return Err(Error::numeric("degenerate fiber: wedge polynomial vanished"));
    }
    // Strip (numerically) vanishing leading coefficients; each missing degree
    // is a preimage at infinity.
    let mut e = d;
    while e > 0 && cs[e].norm() <= 1e-13 * top {
        e -= 1;
    }
    cs.truncate(e + 1);
    let slot = rng.gen_range(0..d);
    if slot >= e {
        return Ok(PPoint::infinity());
    }
    if e == 0 {
        return Ok(PPoint::infinity());
    }
    let roots = aberth(&cs)?;
    Ok(PPoint::from_affine(roots[slot].z))
}

/// U-statistic estimate of the equilibrium pair energy
/// `E[ln chordal(X,Y) - g_F(X) - g_F(Y)]`, with a row-bootstrap standard
/// error plus the systematic Green tail. Compared downstream against the
/// exact value -ln|Res F| / (d(d-1)).
pub fn energy_estimate(g: &GreenEvaluator, samples: &[PPoint]) -> Result<(f64, f64)> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::degenerate("pair energy needs at least two samples"));
    }
    let esc: Vec<f64> = samples
        .iter()
        .map(|p| g.escape(p).map(|(v, _)| v))
        .collect::<Result<_>>()?;
    let mut rows = vec![Kahan::new(); m];
    let mut skipped = 0usize;
    for i in 0..m {
        for j in (i + 1)..m {
            let lc = point::ln_chordal(&samples[i], &samples[j]);
            if !lc.is_finite() {
                skipped += 1;
                continue;
            }
            let phi = lc - esc[i] - esc[j];
            rows[i].add(phi);
            rows[j].add(phi);
        }
    }
    let row_means: Vec<f64> = rows.iter().map(|k| k.total() / (m as f64 - 1.0)).collect();
    let mean = row_means.iter().sum::<f64>() / m as f64;
    let var = row_means.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (m as f64 - 1.0);
    let se_stat = 2.0 * (var / m as f64).sqrt();
    let systematic = 2.0 * g.tail_bound(g.depth()) + skipped as f64 * 1e-6;
    Ok((mean, se_stat + systematic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse::parse_map;

    const LN2: f64 = std::f64::consts::LN_2;

    fn squaring() -> MapLift {
        parse_map("z^2").unwrap()
    }

    fn green(lift: &MapLift) -> GreenEvaluator {
        GreenEvaluator::new(lift, GreenEvaluator::DEFAULT_DEPTH).unwrap()
    }

    #[test]
    fn squaring_escape_closed_form() {
        let g = green(&squaring());
        // g_F = ln max(|p0|,|p1|) - ln||(p0,p1)||.
        let (at_zero, _) = g.escape(&PPoint::zero()).unwrap();
        assert!(at_zero.abs() < 1e-12);
        let (at_one, tail) = g.escape(&PPoint::from_affine(Complex64::new(1.0, 0.0))).unwrap();
        assert!((at_one + 0.5 * LN2).abs() < tail + 1e-12, "{at_one}");
        let (at_inf, _) = g.escape(&PPoint::infinity()).unwrap();
        assert!(at_inf.abs() < 1e-12);
        let z = Complex64::new(-0.3, 0.7);
        let expect = z.norm().ln().max(0.0) - 0.5 * (1.0 + z.norm_sqr()).ln();
        let (v, tail) = g.escape(&PPoint::from_affine(z)).unwrap();
        assert!((v - expect).abs() < tail + 1e-10);
    }

    #[test]
    fn v_green_is_exact_resultant_value() {
        assert_eq!(green(&squaring()).v_green(), 0.0);
        let f = parse_map("4 p0^2 ; p1^2").unwrap();
        // Res = 16, d(d-1) = 2.
        assert!((green(&f).v_green() + 2.0 * LN2).abs() < 1e-14);
    }

    #[test]
    fn sup_tf_grid_estimate_brackets_known_value() {
        // For the squaring lift sup|T_F| = ln2 / 2.
        let g = green(&squaring());
        assert!(g.sup_tf_bound() >= 0.5 * LN2 - 1e-6);
        assert!(g.sup_tf_bound() <= 0.5 * LN2 * 1.26);
        assert!(g.sup_tf_coeff_bound() >= g.sup_tf_bound());
    }

    #[test]
    fn telescoping_deltas_respect_tail_bound() {
        let maps = ["z^2", "z^2 - 2", "z^3 - z + 1/2", "p0^2 ; 2 p1^2 - p0^2"];
        let mut rng = substream(5, 0x677265656e, 0);
        for m in maps {
            let lift = parse_map(m).unwrap();
            let g = green(&lift);
            for _ in 0..100 {
                let p = crate::arch::fekete::random_sphere_point(&mut rng);
                for n in [1u32, 2, 5, 9] {
                    let (a, _) = g.escape_at_depth(&p, n).unwrap();
                    let (b, _) = g.escape_at_depth(&p, n + 1).unwrap();
                    let allow = g.sup_tf_bound() / (g.degree() as f64).powi(n as i32 + 1);
                    assert!(
                        (b - a).abs() <= allow + 1e-12,
                        "map {m}: delta {} > {allow}",
                        (b - a).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn equilibrium_of_squaring_sits_on_unit_circle() {
        let pts = equilibrium_sample(&squaring(), 80, 1234).unwrap();
        assert_eq!(pts.len(), 80);
        let mut mean = Complex64::new(0.0, 0.0);
        for p in &pts {
            let z = p.affine().expect("no infinite sample for the squaring map");
            assert!((z.norm() - 1.0).abs() < 1e-6, "|z| = {}", z.norm());
            mean += z;
        }
        mean /= 80.0;
        assert!(mean.norm() < 3.0 / (80f64).sqrt());
    }

    #[test]
    fn equilibrium_is_seed_deterministic() {
        let a = equilibrium_sample(&squaring(), 5, 42).unwrap();
        let b = equilibrium_sample(&squaring(), 5, 42).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(point::chordal(x, y), 0.0);
        }
    }

    #[test]
    fn energy_matches_resultant_formula() {
        // Res = 1 for the squaring lift: energy 0.
        let g = green(&squaring());
        let pts = equilibrium_sample(&squaring(), 90, 7).unwrap();
        let (e, se) = energy_estimate(&g, &pts).unwrap();
        assert!(e.abs() <= 3.0 * se, "energy {e}, se {se}");

        // Scaled lift (4 p0^2 ; p1^2): exact energy -2 ln2.
        let f = parse_map("4 p0^2 ; p1^2").unwrap();
        let g = green(&f);
        let pts = equilibrium_sample(&f, 90, 8).unwrap();
        let (e, se) = energy_estimate(&g, &pts).unwrap();
        assert!((e + 2.0 * LN2).abs() <= 3.0 * se, "energy {e}, se {se}");
    }

    #[test]
    fn energy_two_samples_is_finite() {
        let g = green(&squaring());
        let pts = vec![
            PPoint::from_affine(Complex64::new(1.0, 0.0)),
            PPoint::from_affine(Complex64::new(0.0, 1.0)),
        ];
        let (e, _) = energy_estimate(&g, &pts).unwrap();
        assert!(e.is_finite());
    }

    #[test]
    fn weight_fn_is_normalized_green() {
        let g = std::sync::Arc::new(green(&squaring()));
        let w = GreenEvaluator::weight_fn(&g, "ghat-square");
        let one = PPoint::from_affine(Complex64::new(1.0, 0.0));
        assert!((w.eval(&one) + 0.5 * LN2).abs() < 1e-10);
    }
}
