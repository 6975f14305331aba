//! The fixed catalog of archimedean test functions used by the
//! equidistribution drivers, each shipped with Lipschitz and Dirichlet data.
//!
//! The chart coordinates are the sphere coordinates of the projective line
//! under the embedding whose Euclidean distance is the chordal metric; their
//! Lipschitz constant is exactly 1 and their Dirichlet energy is exactly 1/3.
//! The smoothed log kernel delegates to [`smoothed_log_kernel`] and computes
//! its Dirichlet energy from the two measures in its Laplacian.

use std::sync::Arc;

use crate::arch::fekete::WeightFn;
use crate::arch::point::PPoint;
use crate::arch::regularize::{pair_energy, smear_average, smeared_log, smoothed_log_kernel};
use crate::util::{gauss_legendre_unit, Kahan};
use num::complex::Complex64;

/// A test function on the complex projective line together with the data
/// the discrepancy bounds consume. `lip` is a constant for the chordal
/// metric; `dirichlet` is the gradient energy `(1/2pi) int |grad phi|^2`.
#[derive(Clone)]
pub struct TestFn {
    label: String,
    lip: f64,
    dirichlet: f64,
    /// Whether `lip`/`dirichlet` are closed-form or fitted/quadrature values.
    exact_data: bool,
    eval: Arc<dyn Fn(&PPoint) -> f64 + Sync + Send>,
}

impl TestFn {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, p: &PPoint) -> f64 {
        (self.eval)(p)
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn dirichlet(&self) -> f64 {
        self.dirichlet
    }

    pub fn exact_data(&self) -> bool {
        self.exact_data
    }

    /// The factor `max{Lip, sqrt(Dirichlet)}` entering discrepancy bounds.
    pub fn bound_factor(&self) -> f64 {
        self.lip.max(self.dirichlet.sqrt())
    }

    /// Real part of the affine coordinate read through the sphere chart:
    /// `Re(c1 conj(c0)) / ||c||^2`, smooth on all of the sphere.
    pub fn re_chart() -> Self {
        TestFn {
            label: "re-chart".into(),
            lip: 1.0,
            dirichlet: 1.0 / 3.0,
            exact_data: true,
            eval: Arc::new(|p: &PPoint| {
                let n2 = p.c0().norm_sqr() + p.c1().norm_sqr();
                (p.c1() * p.c0().conj()).re / n2
            }),
        }
    }

    /// Imaginary-part sibling of [`TestFn::re_chart`].
    pub fn im_chart() -> Self {
        TestFn {
            label: "im-chart".into(),
            lip: 1.0,
            dirichlet: 1.0 / 3.0,
            exact_data: true,
            eval: Arc::new(|p: &PPoint| {
                let n2 = p.c0().norm_sqr() + p.c1().norm_sqr();
                (p.c1() * p.c0().conj()).im / n2
            }),
        }
    }

    /// Constant function; detects normalization bugs (its discrepancy must
    /// vanish identically, not merely within tolerance).
    pub fn constant(c: f64) -> Self {
        TestFn {
            label: format!("const[{c}]"),
            lip: 0.0,
            dirichlet: 0.0,
            exact_data: true,
            eval: Arc::new(move |_| c),
        }
    }

    /// The eps-smoothed chordal log kernel centered at `w0`. The Lipschitz
    /// constant is the fitted one of the underlying weight; the Dirichlet
    /// energy comes from pairing the kernel against the two unit measures in
    /// its Laplacian (the smear at `w0` and the Fubini-Study form).
    pub fn smoothed_kernel(w0: &PPoint, eps: f64) -> Self {
        let w = smoothed_log_kernel(w0, eps);
        let dirichlet = kernel_dirichlet(w0, eps);
        let (_, lip) = w.holder();
        TestFn {
            label: w.label().to_string(),
            lip,
            dirichlet,
            exact_data: false,
            eval: Arc::new(move |p: &PPoint| w.eval(p)),
        }
    }

    /// Wraps an arbitrary weight function, keeping its fitted constant.
    pub fn from_weight(w: WeightFn, dirichlet: f64) -> Self {
        let (_, lip) = w.holder();
        TestFn {
            label: w.label().to_string(),
            lip,
            dirichlet,
            exact_data: false,
            eval: Arc::new(move |p: &PPoint| w.eval(p)),
        }
    }

    /// The default catalog: both chart coordinates and one smoothed log
    /// kernel centered off the unit circle.
    pub fn catalog() -> Vec<TestFn> {
        vec![
            TestFn::re_chart(),
            TestFn::im_chart(),
            TestFn::smoothed_kernel(&PPoint::from_affine(Complex64::new(2.0, 0.0)), 0.5),
        ]
    }
}

/// Dirichlet energy of the smoothed log kernel phi at a finite center:
/// its Laplacian is (smear at w0, scale eps/2) minus (Fubini-Study), both of
/// unit mass, so the energy is `int phi dOmega - int phi dRho`. Each pairing
/// reduces to the closed smear forms plus one small quadrature over the
/// smeared ball where the kernel departs from ln|z - w0|.
fn kernel_dirichlet(w0: &PPoint, eps: f64) -> f64 {
    let half = eps / 2.0;
    let a = w0
        .affine()
        .expect("kernel centers at infinity are not in the catalog");
    let a_norm = w0.ln_norm_affine();

    // int phi dRho: the double smear self-average of ln|x - y| minus the
    // averaged chart norms.
    let rho_ln = pair_energy(0.0, half);
    let rho_norm = smear_average(a, half, |z| 0.5 * z.norm_sqr().ln_1p());
    let int_rho = rho_ln - rho_norm - a_norm;

    // int phi dOmega: the Fubini-Study potential of a point cancels the
    // kernel's -ln||(1, w0)|| term, int ln||(1,z)|| dOmega = 1/2, and the
    // smear only shifts the potential inside the ball |z - w0| < eps/2,
    // which the quadrature below picks up.
    let radial = gauss_legendre_unit(32);
    let mut corr = Kahan::new();
    let na = 64usize;
    for &(tau, wgt) in &radial {
        let r = half * tau;
        if r == 0.0 {
            continue;
        }
        let diff = smeared_log(r, half) - r.ln();
        let mut density = Kahan::new();
        for j in 0..na {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / na as f64;
            let z = a + Complex64::from_polar(r, phi);
            density.add((1.0 + z.norm_sqr()).powi(-2));
        }
        corr.add(wgt * half * diff * 2.0 * r * density.total() / na as f64);
    }
    let int_omega = corr.total() - 0.5;

    int_omega - int_rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::point::chordal;
    use crate::util::substream;
    use rand::Rng;

    fn random_point(rng: &mut impl Rng) -> PPoint {
        let mut g = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        PPoint::new(g(), g()).unwrap_or_else(|_| PPoint::zero())
    }

    #[test]
    fn chart_coordinates_are_one_lipschitz_for_the_chordal_metric() {
        let fns = [TestFn::re_chart(), TestFn::im_chart()];
        let mut rng = substream(7, 0x636861727473, 0);
        for _ in 0..4000 {
            let (p, q) = (random_point(&mut rng), random_point(&mut rng));
            let d = chordal(&p, &q);
            for f in &fns {
                assert!(
                    (f.eval(&p) - f.eval(&q)).abs() <= d + 1e-12,
                    "{} broke its Lipschitz constant",
                    f.label()
                );
            }
        }
    }

    #[test]
    fn chart_values_match_the_affine_formula() {
        let re = TestFn::re_chart();
        let im = TestFn::im_chart();
        let z = Complex64::new(0.3, -1.7);
        let p = PPoint::from_affine(z);
        let want = z / (1.0 + z.norm_sqr());
        assert!((re.eval(&p) - want.re).abs() < 1e-14);
        assert!((im.eval(&p) - want.im).abs() < 1e-14);
        assert_eq!(re.eval(&PPoint::infinity()), 0.0);
        // The chart peaks at |z| = 1 with value 1/2.
        assert!((re.eval(&PPoint::from_affine(Complex64::new(1.0, 0.0))) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn chart_dirichlet_energy_matches_quadrature() {
        // (1/2pi) int |grad phi|^2 over C for phi = Re z/(1+|z|^2), radially
        // integrable in closed form; the catalog claims exactly 1/3.
        let radial = gauss_legendre_unit(200);
        let mut acc = 0.0;
        // Substitute r = t/(1-t) to map [0,1) over the plane.
        for &(t, w) in &radial {
            if t >= 1.0 {
                continue;
            }
            let r = t / (1.0 - t);
            let jac = 1.0 / ((1.0 - t) * (1.0 - t));
            // Angular average of |grad phi|^2 at radius r equals
            // (1 + r^4) / (1 + r^2)^4 (the cross term integrates to zero).
            let g = (1.0 + r.powi(4)) / (1.0 + r * r).powi(4);
            acc += w * g * r * jac;
        }
        assert!((acc - 1.0 / 3.0).abs() < 1e-10, "quadrature gave {acc}");
    }

    #[test]
    fn kernel_dirichlet_energy_is_positive_and_scales_like_log_one_over_eps() {
        let w0 = PPoint::from_affine(Complex64::new(2.0, 0.0));
        let d1 = TestFn::smoothed_kernel(&w0, 0.5).dirichlet();
        let d2 = TestFn::smoothed_kernel(&w0, 0.05).dirichlet();
        assert!(d1 > 0.0);
        // Shrinking eps by e^t raises the energy by ~t.
        let expect = (0.5f64 / 0.05).ln();
        assert!(
            ((d2 - d1) - expect).abs() < 0.2,
            "energy grew by {} instead of ~{}",
            d2 - d1,
            expect
        );
    }

    #[test]
    fn dirichlet_square_root_stays_below_the_lipschitz_constant() {
        for f in TestFn::catalog() {
            assert!(
                f.dirichlet().sqrt() <= f.lip() + 1e-9,
                "{}: sqrt(dirichlet) {} > lip {}",
                f.label(),
                f.dirichlet().sqrt(),
                f.lip()
            );
        }
    }
}
