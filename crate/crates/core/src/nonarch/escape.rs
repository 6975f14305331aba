//! Escape-rate Green values at a finite prime by modular iteration.
//!
//! For a content-normalized integer lift F and coprime integer coordinates,
//! every per-step norm drop e_m = min(v_p of the two image coordinates)
//! satisfies 0 <= e_m <= v_p(Res F): the Sylvester cofactor identity writes
//! Res * x_i^{2d-1} inside the coordinate ideal of F. The depth-n value
//! -sum e_m / d^(m+1) therefore approximates the local Green value with a
//! certified tail v_p(Res) / (d^n (d-1)), all in exact rational multiples
//! of ln p. Good reduction short-circuits to exactly zero.

use crate::error::Error;
use crate::exact::form::normalize_content;
use crate::exact::{MapLift, Rat};
use crate::places::valuation;
use crate::Result;
use num::{BigInt, BigUint, Integer, One, Signed, Zero};

/// A certified local escape value: all quantities are coefficients of ln p.
#[derive(Clone, Debug)]
pub struct EscapeP {
    /// The depth-n partial value (nonpositive).
    pub coeff: Rat,
    /// Bound on the distance to the limit.
    pub tail_coeff: Rat,
    /// How the value was obtained.
    pub method: String,
}

/// Local escape value of the map at the projective point (x0 : x1) over Q.
pub fn green_escape_p(
    lift: &MapLift,
    x0: &BigInt,
    x1: &BigInt,
    p: u64,
    depth: u32,
) -> Result<EscapeP> {
    if x0.is_zero() && x1.is_zero() {
        return Err(Error::degenerate("projective point needs a nonzero pair"));
    }
    if p < 2 {
        return Err(Error::degenerate("prime must be at least 2"));
    }
    let d = lift.deg();
    if d < 2 {
        return Err(Error::unsupported("escape values need degree >= 2"));
    }
    let norm = normalize_content(lift);
    let pp = BigUint::from(p);
    let vres = valuation(norm.resultant(), &pp).max(0) as u64;

    // Coprime integer coordinates: unit sup norm at every prime.
    let g = x0.gcd(x1);
    let (a0, a1) = (x0 / &g, x1 / &g);

    if vres == 0 {
        return Ok(EscapeP {
            coeff: Rat::zero(),
            tail_coeff: Rat::zero(),
            method: format!("exact-zero (good reduction at {p})"),
        });
    }

    let c0: Vec<BigInt> = norm.f0().coeffs().iter().map(rat_int).collect();
    let c1: Vec<BigInt> = norm.f1().coeffs().iter().map(rat_int).collect();
    let pb = BigInt::from(p);

    // Working precision: enough to survive depth * vres lost digits and
    // still resolve valuations up to vres at every step.
    let mut m_total = depth as u64 * (vres + 1) + vres + 16;
    'restart: for _attempt in 0..2 {
        let mut modulus = pb.pow(
            u32::try_from(m_total).map_err(|_| Error::numeric("precision overflow"))?,
        );
        let mut m_cur = m_total;
        let mut y0 = a0.mod_floor(&modulus);
        let mut y1 = a1.mod_floor(&modulus);
        let mut acc = Rat::zero();
        let mut dpow = BigInt::one();
        for _step in 0..depth {
            let w0 = eval_form_mod(&c0, d, &y0, &y1, &modulus);
            let w1 = eval_form_mod(&c1, d, &y0, &y1, &modulus);
            let e0 = trailing_valuation(&w0, &pb, m_cur);
            let e1 = trailing_valuation(&w1, &pb, m_cur);
            let e = e0.min(e1);
            if e > vres {
                // Theory caps e at v_p(Res); hitting the cap means the
                // residues ran out of digits. Retry with more precision.
                m_total *= 2;
                continue 'restart;
            }
            dpow *= d as i64;
            if e > 0 {
                acc += Rat::new(BigInt::from(e), dpow.clone());
                let shift = pb.pow(e as u32);
                y0 = &w0 / &shift;
                y1 = &w1 / &shift;
                modulus /= &shift;
                m_cur -= e;
            } else {
                y0 = w0;
                y1 = w1;
            }
        }
        // After the loop dpow = d^depth; the geometric tail is
        // vres / (d^depth (d-1)).
        let tail_coeff = Rat::new(BigInt::from(vres), (BigInt::from(d) - 1) * &dpow);
        return Ok(EscapeP {
            coeff: -acc,
            tail_coeff,
            method: format!("mod p^{m_total} iteration, depth {depth}"),
        });
    }
    Err(Error::numeric(
        "escape iteration kept losing p-adic precision",
    ))
}

fn rat_int(c: &Rat) -> BigInt {
    debug_assert!(c.denom().is_one(), "normalized lift has integer entries");
    c.numer().clone()
}

/// v_p of a residue known mod p^m_cur; a zero residue reports m_cur, which
/// the caller treats as "at least this much".
fn trailing_valuation(x: &BigInt, p: &BigInt, m_cur: u64) -> u64 {
    if x.is_zero() {
        return m_cur;
    }
    let mut v = 0u64;
    let mut n = x.abs();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        n = q;
        if v >= m_cur {
            return v;
        }
    }
}

fn eval_form_mod(
    coeffs: &[BigInt],
    d: usize,
    x0: &BigInt,
    x1: &BigInt,
    modulus: &BigInt,
) -> BigInt {
    let mut pow0 = vec![BigInt::one(); d + 1];
    let mut pow1 = vec![BigInt::one(); d + 1];
    for k in 1..=d {
        pow0[k] = (&pow0[k - 1] * x0).mod_floor(modulus);
        pow1[k] = (&pow1[k - 1] * x1).mod_floor(modulus);
    }
    let mut acc = BigInt::zero();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc += ((c * &pow0[d - k]).mod_floor(modulus) * &pow1[k]).mod_floor(modulus);
    }
    acc.mod_floor(modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse::parse_map;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn good_reduction_is_exactly_zero() {
        let f = parse_map("z^2").unwrap();
        for p in [2u64, 3, 97] {
            let e = green_escape_p(&f, &big(7), &big(5), p, 24).unwrap();
            assert!(e.coeff.is_zero());
            assert!(e.tail_coeff.is_zero());
            assert!(e.method.contains("good reduction"));
        }
        // z^2 - 2 lifts to (p0^2 ; p1^2 - 2 p0^2) with resultant 1:
        // good reduction everywhere, including p = 2.
        let f = parse_map("z^2 - 2").unwrap();
        let e = green_escape_p(&f, &big(1), &big(3), 2, 24).unwrap();
        assert!(e.coeff.is_zero());
    }

    #[test]
    fn scaled_squaring_hand_value() {
        // F = (4 p0^2 ; p1^2), Res = 16. At (1 : 2): F(1,2) = (4,4), so one
        // drop of 2 digits at step zero and clean iterates afterwards:
        // g_2 = -2/2 = -1 in units of ln 2.
        let f = parse_map("4 p0^2 ; p1^2").unwrap();
        let e = green_escape_p(&f, &big(1), &big(2), 2, 30).unwrap();
        assert_eq!(e.coeff, Rat::from_integer((-1).into()));
        // At (1 : 1) nothing ever drops.
        let e = green_escape_p(&f, &big(1), &big(1), 2, 30).unwrap();
        assert!(e.coeff.is_zero());
        // Odd primes never see the bad fiber.
        let e = green_escape_p(&f, &big(1), &big(2), 3, 30).unwrap();
        assert!(e.coeff.is_zero());
    }

    #[test]
    fn depth_refinement_stays_within_tail() {
        let f = parse_map("p0^2 ; 2 p1^2 + p0 p1").unwrap();
        let shallow = green_escape_p(&f, &big(3), &big(2), 2, 8).unwrap();
        let deep = green_escape_p(&f, &big(3), &big(2), 2, 26).unwrap();
        let gap = (&shallow.coeff - &deep.coeff).abs();
        assert!(gap <= shallow.tail_coeff);
        assert!(deep.tail_coeff < shallow.tail_coeff);
    }

    #[test]
    fn non_coprime_input_is_normalized() {
        let f = parse_map("4 p0^2 ; p1^2").unwrap();
        let a = green_escape_p(&f, &big(10), &big(20), 2, 20).unwrap();
        let b = green_escape_p(&f, &big(1), &big(2), 2, 20).unwrap();
        assert_eq!(a.coeff, b.coeff);
    }

    #[test]
    fn degenerate_inputs_error() {
        let f = parse_map("z^2").unwrap();
        assert!(green_escape_p(&f, &big(0), &big(0), 2, 10).is_err());
    }
}
