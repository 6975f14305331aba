//! Smoothing of point masses on the sphere and the regularized pair energy.
//!
//! A point mass at affine w is replaced by the probability measure `[w]_eps`
//! obtained by averaging the circle of radius `eps*tau` around w against the
//! bump density xi(tau) = 30 tau^2 (1-tau)^2 on [0,1]. A mass at infinity is
//! smeared the same way in the inverted chart u = 1/z. Everything here
//! reduces to two closed forms:
//!
//!   smeared_log(s, eps)  = avg over [b]_eps of ln|z - b| at distance s,
//!   pair_energy(s, eps)  = avg of ln|x - y| with both endpoints smeared.
//!
//! Both equal ln s once s clears the smearing radius (s >= eps resp.
//! s >= 2 eps), because circle averages of the harmonic ln|.| are exact.
//! At coincident centers the self-energy is ln eps + C_XI exactly.

use crate::arch::fekete::WeightFn;
use crate::arch::point::PPoint;
use crate::arch::roots::RootCloud;
use crate::util::{gauss_legendre_unit, Kahan};
use num::complex::Complex64;
use std::f64::consts::PI;

/// Self-energy constant: pair_energy(0, eps) = ln eps + C_XI.
/// Equals -integral of Xi(t)^2/t over [0,1], a rational number.
pub const C_XI: f64 = -449.0 / 840.0;

/// Value of Lambda at 1 (see `cap_lambda`): -47/60.
const LAMBDA_1: f64 = -47.0 / 60.0;

/// The bump density xi on [0,1], mass one.
pub fn xi(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    30.0 * t * t * (1.0 - t) * (1.0 - t)
}

/// Cumulative mass Xi(t) of xi.
pub fn xi_mass(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Antiderivative bookkeeping term Lambda(t) = Xi(t) ln t - P(t) where
/// P' = Xi/t. Continuous at 0 with Lambda(0) = 0.
fn cap_lambda(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let p = t * t * t * (10.0 / 3.0 + t * (-15.0 / 4.0 + 6.0 / 5.0 * t));
    xi_mass(t) * t.ln() - p
}

/// Average of ln|z - b| over z in the smear `[b']_eps` at center distance s.
/// Exactly ln s for s >= eps; at s = 0 this is ln eps + Lambda(1).
pub fn smeared_log(s: f64, eps: f64) -> f64 {
    debug_assert!(eps > 0.0 && s >= 0.0);
    if s >= eps {
        return s.ln();
    }
    if s == 0.0 {
        return eps.ln() + LAMBDA_1;
    }
    let t = s / eps;
    let xm = xi_mass(t);
    xm * s.ln() + (1.0 - xm) * eps.ln() + LAMBDA_1 - cap_lambda(t)
}

/// Radial derivative of `smeared_log` in s. Bounded by 1.2 / eps.
pub fn smeared_log_slope(s: f64, eps: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= eps {
        return 1.0 / s;
    }
    xi_mass(s / eps) / s
}

/// Energy of two eps-smears at center distance s:
/// the double average of ln|x - y|. Exactly ln s for s >= 2 eps and
/// ln eps + C_XI at s = 0; in between it is computed by quadrature
/// (radial Gauss-Legendre 64 against xi, angular midpoint 256).
pub fn pair_energy(s: f64, eps: f64) -> f64 {
    debug_assert!(eps > 0.0 && s >= 0.0);
    if s >= 2.0 * eps {
        return s.ln();
    }
    if s == 0.0 {
        return eps.ln() + C_XI;
    }
    let radial = gauss_legendre_unit(64);
    let na = 256usize;
    let mut acc = Kahan::new();
    for &(tau, w) in &radial {
        let r = eps * tau;
        let mut angular = Kahan::new();
        for j in 0..na {
            let phi = PI * (j as f64 + 0.5) / na as f64;
            let dist = (s * s + r * r - 2.0 * s * r * phi.cos()).max(0.0).sqrt();
            angular.add(smeared_log(dist, eps));
        }
        acc.add(w * xi(tau) * angular.total() / na as f64);
    }
    acc.total()
}

/// Average of `f` over the smear `[center]_eps` in the affine chart,
/// by Gauss-Legendre 16 in radius against xi and 64 midpoint angles.
pub fn smear_average(center: Complex64, eps: f64, f: impl Fn(Complex64) -> f64) -> f64 {
    let radial = gauss_legendre_unit(16);
    let na = 64usize;
    let mut acc = Kahan::new();
    for &(tau, w) in &radial {
        let r = eps * tau;
        let mut angular = Kahan::new();
        for j in 0..na {
            let phi = 2.0 * PI * (j as f64 + 0.5) / na as f64;
            angular.add(f(center + Complex64::from_polar(r, phi)));
        }
        acc.add(w * xi(tau) * angular.total() / na as f64);
    }
    acc.total()
}

/// Chart marker for one support point of a smeared divisor.
enum Smear {
    /// Affine chart, smear around this center.
    Std(Complex64),
    /// Inverted chart u = 1/z, smear around u = 0 (the point at infinity).
    Inv,
}

/// Regularized weighted pair energy of a root cloud:
/// the full double integral of ln[x,y] - g(x) - g(y) against the smeared
/// divisor measure (diagonal included; the smears are continuous).
/// Returns the value and a propagated error estimate.
pub fn regularized_fekete(cloud: &RootCloud, g: &WeightFn, eps: f64) -> (f64, f64) {
    let deg = cloud.degree() as f64;
    let pts = cloud.points();
    let smears: Vec<(Smear, f64)> = pts
        .iter()
        .map(|(p, m)| {
            let s = match p.affine() {
                Some(a) => Smear::Std(a),
                None => Smear::Inv,
            };
            (s, *m as f64)
        })
        .collect();

    // Per-point smeared averages of the chart norm term and of the weight.
    let navg: Vec<f64> = smears
        .iter()
        .map(|(s, _)| match s {
            Smear::Std(a) => smear_average(*a, eps, |z| ln_norm_affine(z)),
            Smear::Inv => smear_average(Complex64::new(0.0, 0.0), eps, ln_norm_affine),
        })
        .collect();
    let gavg: Vec<f64> = smears
        .iter()
        .map(|(s, _)| match s {
            Smear::Std(a) => smear_average(*a, eps, |z| g.eval(&PPoint::from_affine(z))),
            Smear::Inv => smear_average(Complex64::new(0.0, 0.0), eps, |u| {
                g.eval(&inverted_point(u))
            }),
        })
        .collect();

    // Distance parts of the pairwise smeared chordal kernels.
    let mut core = Kahan::new();
    for i in 0..smears.len() {
        for j in i..smears.len() {
            let factor = if i == j {
                smears[i].1 * smears[i].1
            } else {
                2.0 * smears[i].1 * smears[j].1
            };
            let c = match (&smears[i].0, &smears[j].0) {
                (Smear::Std(a), Smear::Std(b)) => pair_energy((a - b).norm(), eps),
                (Smear::Inv, Smear::Inv) => pair_energy(0.0, eps),
                (Smear::Std(a), Smear::Inv) | (Smear::Inv, Smear::Std(a)) => {
                    cross_chart_core(*a, eps)
                }
            };
            core.add(factor * c);
        }
    }

    let mut value = core.total();
    let mut err = 1e-9 * deg * deg;
    for (i, (_, m)) in smears.iter().enumerate() {
        value -= 2.0 * deg * m * (navg[i] + gavg[i]);
        // Center position error enters every kernel term with slope <= 1.2/eps
        // and the weight through its smoothness modulus.
        let pe = cloud.pos_err(i);
        let (ha, hc) = g.holder();
        err += 2.0 * deg * m * (1.2 / eps * pe + hc * pe.powf(ha));
    }
    err += 2.0 * deg * deg * g.eval_err();
    (value, err)
}

/// Distance part of the smeared kernel between a standard-chart smear at `a`
/// and the inverted-chart smear at infinity: the double average of
/// ln|1 - z u|. The inner circle average collapses to ln|z| + m(|1/z|, eps),
/// which vanishes identically while |z| <= 1/eps.
fn cross_chart_core(a: Complex64, eps: f64) -> f64 {
    if a.norm() + eps <= 1.0 / eps {
        return 0.0;
    }
    smear_average(a, eps, |z| {
        let zn = z.norm();
        if zn <= 1.0 / eps {
            0.0
        } else {
            zn.ln() + smeared_log(1.0 / zn, eps)
        }
    })
}

fn ln_norm_affine(z: Complex64) -> f64 {
    0.5 * z.norm_sqr().ln_1p()
}

/// The projective point 1/u, valid at u = 0 (infinity).
fn inverted_point(u: Complex64) -> PPoint {
    PPoint::new(u, Complex64::new(1.0, 0.0)).expect("second coordinate is one")
}

/// The eps-smoothed chordal log kernel centered at w0, as a weight function:
///
///   phi(z) = smeared_log(|z - w0|, eps/2) - ln||(1,z)|| - ln||(1,w0)||,
///
/// which agrees with ln chordal(z, w0) outside the affine eps/2 ball and is
/// continuous and bounded on the whole sphere. For w0 at infinity the same
/// formula is applied in the inverted chart. The returned weight carries a
/// fitted Lipschitz constant (growing like 1/eps).
pub fn smoothed_log_kernel(w0: &PPoint, eps: f64) -> WeightFn {
    let half = eps / 2.0;
    let mut w = if w0.is_infinity() {
        WeightFn::new(format!("log-kernel[inf; eps={eps}]"), 1e-14, move |p| {
            // u = 1/z = c0/c1; the point z = 0 has u at infinity and kernel 0.
            let (c0, c1) = (p.c0(), p.c1());
            if c1.norm() == 0.0 {
                return 0.0;
            }
            let u = c0 / c1;
            smeared_log(u.norm(), half) - ln_norm_affine(u)
        })
    } else {
        let a = w0.affine().expect("finite center");
        let a_norm = w0.ln_norm_affine();
        WeightFn::new(
            format!("log-kernel[{:.6}{:+.6}i; eps={eps}]", a.re, a.im),
            1e-14,
            move |p| match p.affine() {
                None => -a_norm,
                Some(z) => smeared_log((z - a).norm(), half) - p.ln_norm_affine() - a_norm,
            },
        )
    };
    w.fit_holder(1.0, 0x736d6f6f, 3000);
    w
}
