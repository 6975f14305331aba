//! Randomized algebraic invariants of the exact layer: laws that must hold
//! for every input, checked on generated polynomials, rationals, points, and
//! disks rather than hand-picked cases.

use adeliq::arch::point::{chordal, PPoint};
use adeliq::exact::poly::poly_i64;
use adeliq::exact::{
    dstar, resultant_uni, BinaryForm, CoeffBudget, MapLift, MultiplicityStrata, Rat, UniPoly,
};
use adeliq::nonarch::{median, SkeletonPoint};
use adeliq::places::{gauss_valuation, product_formula_check, rational_content, ExactLog};
use num::complex::Complex64;
use num::{BigInt, BigUint, One, Signed, Zero};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Nonzero rational supported on small primes, so exact factorization in
/// `ExactLog::ln_abs` and the product formula stays cheap.
fn smooth_rational() -> impl Strategy<Value = Rat> {
    (
        prop::collection::vec(-6i32..=6, 6),
        prop::bool::ANY,
    )
        .prop_map(|(exps, neg)| {
            let primes = [2i64, 3, 5, 7, 11, 13];
            let mut x = Rat::one();
            for (p, e) in primes.iter().zip(exps) {
                x *= Rat::from_integer(BigInt::from(*p)).pow(e);
            }
            if neg {
                -x
            } else {
                x
            }
        })
}

/// Integer-coefficient polynomial of degree 1..=6 with a nonzero lead.
fn small_poly() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(-12i64..=12, 2..=7)
        .prop_filter("nonzero leading coefficient", |c| {
            *c.last().expect("len >= 2") != 0
        })
        .prop_map(|c| poly_i64(&c))
}

/// p(z + s) by Horner over the polynomial ring.
fn shift(p: &UniPoly, s: i64) -> UniPoly {
    let t = poly_i64(&[s, 1]);
    let deg = p.degree().expect("nonzero");
    let mut acc = UniPoly::constant(p.coeff(deg));
    for k in (0..deg).rev() {
        acc = acc.mul(&t).add(&UniPoly::constant(p.coeff(k)));
    }
    acc
}

/// p(lambda z): the k-th coefficient picks up lambda^k.
fn dilate(p: &UniPoly, lambda: &Rat) -> UniPoly {
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * lambda.pow(k as i32))
        .collect();
    UniPoly::from_coeffs(coeffs)
}

/// (sum of multiplicities, sum of squared multiplicities) over the distinct
/// roots of the finite part.
fn mass_and_diagonal(p: &UniPoly) -> (i64, i64) {
    let strata = MultiplicityStrata::of(p).expect("nonzero polynomial");
    let mut mass = 0i64;
    let mut diag = 0i64;
    for s in &strata.strata {
        let d = s.poly.degree().unwrap_or(0) as i64;
        mass += i64::from(s.mult) * d;
        diag += i64::from(s.mult * s.mult) * d;
    }
    (mass, diag)
}

fn random_lift() -> impl Strategy<Value = MapLift> {
    prop::collection::vec(-5i64..=5, 6)
        .prop_filter_map("nondegenerate lift", |c| {
            let f0 = BinaryForm::new(2, vec![rat(c[0], 1), rat(c[1], 1), rat(c[2], 1)]);
            let f1 = BinaryForm::new(2, vec![rat(c[3], 1), rat(c[4], 1), rat(c[5], 1)]);
            MapLift::new(f0, f1).ok()
        })
}

fn finite_point() -> impl Strategy<Value = PPoint> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| PPoint::from_affine(Complex64::new(re, im)))
}

fn projective_point() -> impl Strategy<Value = PPoint> {
    prop_oneof![
        9 => finite_point(),
        1 => Just(PPoint::infinity()),
    ]
}

/// Non-classical disk over a fixed prime, with p-power-rational radius.
fn disk(p: u64) -> impl Strategy<Value = SkeletonPoint> {
    (-40i64..=40, 1i64..=8, -2i32..=2, -8i64..=8, 1i64..=3).prop_map(
        move |(a, b, e, rn, rd)| {
            let center = rat(a, b) * Rat::from_integer(BigInt::from(p)).pow(e);
            SkeletonPoint::disk(p, center, rat(rn, rd))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // The defining property of heights over Q: local absolute values of a
    // nonzero rational multiply to 1, i.e. their logs cancel exactly.
    #[test]
    fn product_formula_holds_on_smooth_rationals(x in smooth_rational()) {
        prop_assert!(product_formula_check(&x).expect("smooth factorization"));
    }

    // log|x y| = log|x| + log|y| as exact prime-log combinations.
    #[test]
    fn exact_log_is_multiplicative(x in smooth_rational(), y in smooth_rational()) {
        let lx = ExactLog::ln_abs(&x).expect("nonzero");
        let ly = ExactLog::ln_abs(&y).expect("nonzero");
        let lxy = ExactLog::ln_abs(&(&x * &y)).expect("nonzero");
        prop_assert_eq!(lxy, lx.add(&ly));
        // The float image must agree with the direct evaluation.
        let direct = adeliq::util::ln_rat_abs(&x);
        let via_log = ExactLog::ln_abs(&x).expect("nonzero").to_f64();
        prop_assert!((direct - via_log).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    // The off-diagonal root product only sees roots, not the leading scale.
    #[test]
    fn dstar_ignores_the_leading_coefficient(p in small_poly(), c in 1i64..=9, neg in prop::bool::ANY) {
        let scale = if neg { rat(-c, 1) } else { rat(c, 1) };
        let scaled = p.scale(&scale);
        prop_assert_eq!(dstar(&scaled).expect("nonzero"), dstar(&p).expect("nonzero"));
    }

    // Root differences are translation invariant.
    #[test]
    fn dstar_is_shift_invariant(p in small_poly(), s in -5i64..=5) {
        prop_assert_eq!(dstar(&shift(&p, s)).expect("nonzero"), dstar(&p).expect("nonzero"));
    }

    // z -> lambda z divides every root difference by lambda; with mass m and
    // diagonal D the off-diagonal pair count is m^2 - D, so the product picks
    // up exactly lambda^(D - m^2).
    #[test]
    fn dstar_scales_by_the_offdiagonal_pair_count(p in small_poly(), a in 1i64..=6, b in 1i64..=4, neg in prop::bool::ANY) {
        let lambda = if neg { rat(-a, b) } else { rat(a, b) };
        let (mass, diag) = mass_and_diagonal(&p);
        let expected = dstar(&p).expect("nonzero") * lambda.pow((diag - mass * mass) as i32);
        prop_assert_eq!(dstar(&dilate(&p, &lambda)).expect("nonzero"), expected);
    }

    // Raising p to the k-th power multiplies every multiplicity by k, so
    // every pair exponent m_i m_j gains a factor k^2.
    #[test]
    fn dstar_of_a_power_is_the_square_power(p in small_poly(), k in 1u32..=3) {
        let lhs = dstar(&p.pow(k)).expect("nonzero");
        let rhs = dstar(&p).expect("nonzero").pow((k * k) as i32);
        prop_assert_eq!(lhs, rhs);
    }

    // The resultant is multiplicative in its first argument.
    #[test]
    fn resultant_is_multiplicative(p in small_poly(), q in small_poly(), r in small_poly()) {
        let lhs = resultant_uni(&p.mul(&q), &r);
        let rhs = resultant_uni(&p, &r) * resultant_uni(&q, &r);
        prop_assert_eq!(lhs, rhs);
    }

    // Gauss's lemma, in valuation form and in content form.
    #[test]
    fn content_and_gauss_valuation_are_multiplicative(p in small_poly(), q in small_poly()) {
        let prod = p.mul(&q);
        for prime in [2u64, 3, 5] {
            let pr = BigUint::from(prime);
            prop_assert_eq!(
                gauss_valuation(&prod, &pr),
                gauss_valuation(&p, &pr) + gauss_valuation(&q, &pr)
            );
        }
        prop_assert_eq!(rational_content(&prod), rational_content(&p) * rational_content(&q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Res(F o G) = Res(F)^(deg G) * Res(G)^((deg F)^2), checked against an
    // independently assembled composition.
    #[test]
    fn resultant_of_a_composition_factors(f in random_lift(), g in random_lift()) {
        let budget = CoeffBudget::default();
        let comp = f.compose(&g, &budget).expect("within budget");
        let expected = f.resultant().pow(g.deg() as i32)
            * g.resultant().pow((f.deg() * f.deg()) as i32);
        prop_assert_eq!(comp.resultant(), &expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // The chordal kernel is a symmetric, [0,1]-bounded metric on the sphere.
    #[test]
    fn chordal_is_a_bounded_symmetric_metric(
        a in projective_point(),
        b in projective_point(),
        c in projective_point(),
    ) {
        let ab = chordal(&a, &b);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, chordal(&b, &a));
        // Floating slack for the catastrophic-cancellation-free wedge form.
        prop_assert!(chordal(&a, &c) <= ab + chordal(&b, &c) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // Join is a commutative, absorbing upper bound in the disk order.
    #[test]
    fn disk_joins_are_lattice_like(p in prop::sample::select(vec![2u64, 3, 5, 7]).prop_flat_map(|p| (disk(p), disk(p)))) {
        let (a, b) = p;
        let j = a.join(&b);
        prop_assert!(j.same_point(&b.join(&a)));
        prop_assert!(j.contains(&a) && j.contains(&b));
        prop_assert!(a.join(&a).same_point(&a));
        // The Hsia kernel exponent is symmetric in its arguments.
        prop_assert_eq!(a.hsia_affine_exp(&b), b.hsia_affine_exp(&a));
        prop_assert_eq!(a.hsia_can_exp(&b), b.hsia_can_exp(&a));
    }

    // Path distance through the median: the median of (a, b, gauss) lies on
    // the segment [a, b], so the two legs add up exactly. Distance vanishes
    // exactly on equal disks.
    #[test]
    fn path_distance_is_additive_through_the_median(p in prop::sample::select(vec![2u64, 3, 5, 7]).prop_flat_map(|p| (disk(p), disk(p), Just(p)))) {
        let (a, b, prime) = p;
        let g = SkeletonPoint::gauss(prime);
        let m = median(&a, &b, &g);
        let full = a.rho_exp(&b).expect("disks");
        let legs = a.rho_exp(&m).expect("disks") + m.rho_exp(&b).expect("disks");
        prop_assert_eq!(full.clone(), legs);
        prop_assert!(full >= Rat::zero());
        prop_assert_eq!(full.is_zero(), a.same_point(&b));
    }
}
