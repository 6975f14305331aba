//! Zero divisors on the projective line and the off-diagonal root product.
//!
//! A divisor is carried by a nonzero binary form: finite support comes from
//! the dehomogenized polynomial, split by Yun's algorithm into squarefree
//! strata of constant multiplicity, and the remaining mass sits at infinity.
//!
//! `dstar` is the unit replacing the discriminant for non-squarefree input:
//! the product of `z_i - z_j` over ordered pairs of *distinct* roots, with
//! the pair multiplicity `m_i m_j`. It is assembled from resultants of the
//! strata, so repeated roots never meet the diagonal and the value stays a
//! nonzero rational.

use super::form::BinaryForm;
use super::poly::{pow_rat, resultant_uni, squarefree_strata, Rat, UniPoly};
use crate::Result;
use num::One;

/// One squarefree stratum: the monic polynomial whose roots all occur in the
/// ambient divisor with the same multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub poly: UniPoly,
    pub mult: u32,
}

/// Yun decomposition of a univariate polynomial: `p = content * prod q_m^m`
/// with the `q_m` monic, squarefree and pairwise coprime.
#[derive(Clone, Debug)]
pub struct MultiplicityStrata {
    pub content: Rat,
    pub strata: Vec<Stratum>,
}

impl MultiplicityStrata {
    pub fn of(p: &UniPoly) -> Result<Self> {
        let (content, parts) = squarefree_strata(p)?;
        let strata = parts
            .into_iter()
            .map(|(poly, mult)| Stratum { poly, mult })
            .collect();
        Ok(MultiplicityStrata { content, strata })
    }

    /// Number of distinct finite roots.
    pub fn distinct_roots(&self) -> usize {
        self.strata
            .iter()
            .map(|s| s.poly.degree().map_or(0, |d| d))
            .sum()
    }
}

/// Effective divisor of zeros of a binary form, with its finite strata and
/// the multiplicity at infinity split out once at construction.
#[derive(Clone, Debug)]
pub struct ZerosDivisor {
    form: BinaryForm,
    dehom: UniPoly,
    inf_mult: usize,
    strata: MultiplicityStrata,
}

impl ZerosDivisor {
    pub fn new(form: BinaryForm) -> Result<Self> {
        if form.is_zero() {
            return Err(crate::Error::ZeroPolynomial);
        }
        let dehom = form.dehomogenize();
        let inf_mult = form.inf_mult();
        let strata = MultiplicityStrata::of(&dehom)?;
        Ok(ZerosDivisor {
            form,
            dehom,
            inf_mult,
            strata,
        })
    }

    /// Divisor of a polynomial's roots, with no mass at infinity.
    pub fn from_poly(p: &UniPoly) -> Result<Self> {
        let d = p.degree().ok_or(crate::Error::ZeroPolynomial)?;
        ZerosDivisor::new(BinaryForm::from_univariate(p, d))
    }

    pub fn form(&self) -> &BinaryForm {
        &self.form
    }

    /// Finite part `P(1, z)`; constant when all mass sits at infinity.
    pub fn finite_part(&self) -> &UniPoly {
        &self.dehom
    }

    pub fn inf_mult(&self) -> usize {
        self.inf_mult
    }

    pub fn strata(&self) -> &MultiplicityStrata {
        &self.strata
    }

    /// Leading coefficient of the finite part.
    pub fn lc(&self) -> &Rat {
        &self.strata.content
    }

    /// Total degree, counting multiplicity and the point at infinity.
    pub fn degree(&self) -> usize {
        self.form.deg()
    }

    /// Number of distinct points in the support.
    pub fn support_size(&self) -> usize {
        self.strata.distinct_roots() + usize::from(self.inf_mult > 0)
    }

    /// `sum_w (ord_w)^2` over the support, infinity included.
    pub fn diagonal(&self) -> u128 {
        let mut acc: u128 = (self.inf_mult as u128) * (self.inf_mult as u128);
        for s in &self.strata.strata {
            let d = s.poly.degree().map_or(0, |d| d) as u128;
            acc += (s.mult as u128) * (s.mult as u128) * d;
        }
        acc
    }
}

/// Off-diagonal product over distinct finite roots of the strata,
/// `prod_{w != w'} (w - w')^{m_w m_{w'}}`, as a nonzero rational.
pub fn dstar_strata(strata: &MultiplicityStrata) -> Rat {
    let mut acc = Rat::one();
    for (i, si) in strata.strata.iter().enumerate() {
        // Within a stratum: every ordered pair of distinct roots of the monic
        // squarefree q appears in Res(q, q') = prod_i q'(z_i) exactly once,
        // so the full ordered product is that resultant, raised to m^2.
        let within = resultant_uni(&si.poly, &si.poly.derivative());
        if !within.is_one() {
            acc *= pow_rat(&within, si.mult * si.mult);
        }
        for sj in &strata.strata[i + 1..] {
            // Across strata: Res(q, r) * Res(r, q) collects both orders of
            // each root pair once; the pair weight is m_q * m_r.
            let cross = resultant_uni(&si.poly, &sj.poly) * resultant_uni(&sj.poly, &si.poly);
            if !cross.is_one() {
                acc *= pow_rat(&cross, si.mult * sj.mult);
            }
        }
    }
    acc
}

/// `dstar` of a nonzero polynomial: the off-diagonal product over its
/// distinct roots weighted by multiplicities. 1 when fewer than two distinct
/// roots exist. The leading coefficient plays no role here; it enters the
/// height identities through a separate term.
pub fn dstar(p: &UniPoly) -> Result<Rat> {
    if p.is_zero() {
        return Err(crate::Error::ZeroPolynomial);
    }
    Ok(dstar_strata(&MultiplicityStrata::of(p)?))
}

/// `dstar` of a divisor's finite part. Mass at infinity contributes nothing:
/// a divisor concentrated there has empty off-diagonal product, hence 1.
pub fn dstar_divisor(z: &ZerosDivisor) -> Rat {
    dstar_strata(&z.strata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::form::{divisor_fn_eq_a, lift_from_poly, CoeffBudget, MapLift};
    use crate::exact::poly::poly_i64;

    fn rat(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn dstar_frozen_values() {
        // Roots 1, -1: (1 - (-1)) * (-1 - 1) = -4.
        assert_eq!(dstar(&poly_i64(&[-1, 0, 1])).unwrap(), rat(-4));
        // (z^2 - 2)^2: within-stratum product (-8), weight m^2 = 4.
        let p = poly_i64(&[-2, 0, 1]).mul(&poly_i64(&[-2, 0, 1]));
        assert_eq!(dstar(&p).unwrap(), rat(4096));
        // (z - 1)(z - 2)^2: cross product (-1)(1) = -1 at weight 1 * 2.
        let p = poly_i64(&[-1, 1]).mul(&poly_i64(&[-2, 1])).mul(&poly_i64(&[-2, 1]));
        assert_eq!(dstar(&p).unwrap(), rat(1));
        // A single distinct root, any multiplicity.
        let p = poly_i64(&[-1, 1]).pow(5);
        assert_eq!(dstar(&p).unwrap(), rat(1));
        // Leading coefficient is ignored.
        assert_eq!(dstar(&poly_i64(&[-7, 0, 7])).unwrap(), rat(-4));
    }

    #[test]
    fn dstar_matches_derivative_resultant_when_squarefree() {
        // For monic squarefree p the off-diagonal product is Res(p, p').
        for coeffs in [
            vec![-1i64, 0, 1],
            vec![0, -1, 0, 1],
            vec![6, -5, 1],
            vec![-2, 0, 0, 0, 1],
        ] {
            let p = poly_i64(&coeffs);
            let expect = resultant_uni(&p, &p.derivative());
            assert_eq!(dstar(&p).unwrap(), expect);
        }
    }

    #[test]
    fn divisor_diagonal_frozen_values() {
        let z = ZerosDivisor::from_poly(&poly_i64(&[-1, 0, 1])).unwrap();
        assert_eq!(z.diagonal(), 2);
        assert_eq!(z.inf_mult(), 0);

        let p = poly_i64(&[-2, 0, 1]).mul(&poly_i64(&[-2, 0, 1]));
        let z = ZerosDivisor::from_poly(&p).unwrap();
        assert_eq!(z.diagonal(), 8);
        assert_eq!(z.support_size(), 2);

        // (z - 1)^3 homogenized one degree high: mass 1 at infinity.
        let cubed = poly_i64(&[-1, 1]).pow(3);
        let z = ZerosDivisor::new(BinaryForm::from_univariate(&cubed, 4)).unwrap();
        assert_eq!(z.inf_mult(), 1);
        assert_eq!(z.diagonal(), 9 + 1);
        assert_eq!(z.degree(), 4);
    }

    #[test]
    fn divisor_of_fixed_points() {
        // [z^2 = z]: support {0, 1, inf}, all simple.
        let f = lift_from_poly(&poly_i64(&[0, 0, 1])).unwrap();
        let w = divisor_fn_eq_a(&f, &MapLift::identity(), 1, &CoeffBudget::default()).unwrap();
        let z = ZerosDivisor::new(w).unwrap();
        assert_eq!(z.degree(), 3);
        assert_eq!(z.inf_mult(), 1);
        assert_eq!(z.diagonal(), 3);
        // Finite roots 0 and 1: (0 - 1)(1 - 0) = -1.
        assert_eq!(dstar_divisor(&z), rat(-1));
    }

    #[test]
    fn all_mass_at_infinity() {
        let form = BinaryForm::new(3, vec![rat(5), rat(0), rat(0), rat(0)]);
        let z = ZerosDivisor::new(form).unwrap();
        assert_eq!(z.inf_mult(), 3);
        assert_eq!(z.diagonal(), 9);
        assert_eq!(dstar_divisor(&z), rat(1));
        assert!(z.finite_part().degree().is_none() || z.finite_part().degree() == Some(0));
    }

    #[test]
    fn dstar_brute_force_integer_roots() {
        // Assemble p with known integer roots and multiplicities, compare the
        // strata product against the literal double product.
        let cases: &[&[(i64, u32)]] = &[
            &[(0, 1), (2, 1), (5, 1)],
            &[(1, 2), (3, 1)],
            &[(-1, 2), (2, 3)],
            &[(-2, 1), (0, 2), (1, 1), (4, 2)],
        ];
        for roots in cases {
            let mut p = UniPoly::constant(rat(3)); // non-monic on purpose
            for &(r, m) in *roots {
                p = p.mul(&poly_i64(&[-r, 1]).pow(m));
            }
            let mut expect = Rat::one();
            for &(ri, mi) in *roots {
                for &(rj, mj) in *roots {
                    if ri != rj {
                        expect *= pow_rat(&rat(ri - rj), mi * mj);
                    }
                }
            }
            assert_eq!(dstar(&p).unwrap(), expect, "roots {roots:?}");
        }
    }
}
