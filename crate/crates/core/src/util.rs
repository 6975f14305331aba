//! Shared numeric plumbing: seeded RNG substreams, compensated summation,
//! logarithms of big rationals, and a deterministic worker pool.

use num::bigint::BigInt;
use num::{BigRational, BigUint, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step, used to derive independent substream seeds.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic RNG substream for task `idx` under stream `tag`.
///
/// Results that are assembled from substreams do not depend on worker count
/// or scheduling, only on `(seed, tag, idx)`.
pub fn substream(seed: u64, tag: u64, idx: u64) -> ChaCha8Rng {
    let mut s = seed ^ tag.rotate_left(17);
    let a = splitmix64(&mut s);
    let mut s2 = a ^ idx.rotate_left(31);
    let b = splitmix64(&mut s2);
    let c = splitmix64(&mut s2);
    let d = splitmix64(&mut s2);
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Neumaier compensated accumulator. Summation order is fixed by the caller,
/// so repeated runs produce bit-identical totals.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Natural log of a positive big integer, accurate to a few ulps even when
/// the value far exceeds the f64 range.
pub fn ln_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    // Anything that fits in a u64 converts directly; the cast rounds to
    // nearest, which costs at most half an ulp before the log.
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).ln();
    }
    // Take the top 64 bits as the mantissa and account for the shift.
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// ln|x| for a nonzero rational, stable for astronomically large entries.
pub fn ln_rat_abs(x: &BigRational) -> f64 {
    debug_assert!(!x.is_zero());
    ln_biguint(x.numer().abs().to_biguint().as_ref().unwrap())
        - ln_biguint(x.denom().abs().to_biguint().as_ref().unwrap())
}

/// Rational to f64 with a log-scale fallback for values outside f64 range.
pub fn rat_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    sign * ln_rat_abs(x).exp()
}

/// Estimated decimal-digit footprint of a rational (numerator + denominator).
pub fn rat_digits(x: &BigRational) -> u64 {
    let bits = x.numer().bits() + x.denom().bits();
    (bits as f64 / 3.321928).ceil() as u64 + 1
}

/// Signed integer to BigInt helper used by parsers and tests.
pub fn bigint(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Run `f` over `0..n` with up to `workers` threads, collecting results in
/// index order. With `workers == 1` this is a plain sequential loop; with
/// more, chunks are processed in parallel but the output vector (and hence
/// any subsequent fixed-order reduction) is identical.
pub fn parallel_map_indexed<R, F>(workers: usize, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = workers.max(1);
    if workers == 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<R>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (i, s) in slot.iter_mut().enumerate() {
                    *s = Some(f(w * chunk + i));
                }
            });
        }
    });
    out.into_iter().map(|r| r.expect("worker filled slot")).collect()
}

/// Gauss–Legendre nodes and weights on [0, 1], computed once by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Initial guess (Chebyshev-like) on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;
    use rand_chacha::rand_core::RngCore;

    #[test]
    fn substreams_differ_and_are_stable() {
        let mut a = substream(7, 1, 0);
        let mut a2 = substream(7, 1, 0);
        let mut b = substream(7, 1, 1);
        let x = a.next_u64();
        assert_eq!(x, a2.next_u64());
        assert_ne!(x, b.next_u64());
    }

    #[test]
    fn ln_biguint_matches_f64_range() {
        let n = BigUint::from(123456789u64);
        assert!((ln_biguint(&n) - (123456789f64).ln()).abs() < 1e-12);
        let big = BigUint::from(10u32).pow(500);
        assert!((ln_biguint(&big) - 500.0 * 10f64.ln()).abs() < 1e-9);
        // The 54..=64 bit window sits between the exact-f64 path and the
        // top-bits path; it must not slip into the shifted branch.
        for bits in 54..=66u32 {
            let n = (BigUint::from(1u8) << bits) - BigUint::from(1u8);
            let expect = bits as f64 * std::f64::consts::LN_2;
            assert!((ln_biguint(&n) - expect).abs() < 1e-9, "bits = {bits}");
        }
    }

    #[test]
    fn rat_to_f64_handles_huge_values() {
        let x = BigRational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(398));
        assert!((rat_to_f64(&x) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn kahan_sums_in_order() {
        let mut k = Kahan::new();
        for _ in 0..1_000_000 {
            k.add(0.1);
        }
        assert!((k.total() - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_map_is_order_stable() {
        let seq = parallel_map_indexed(1, 100, |i| i * i);
        let par = parallel_map_indexed(4, 100, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre_unit(16);
        let integral: f64 = nodes.iter().map(|(x, w)| w * x.powi(5)).sum();
        assert!((integral - 1.0 / 6.0).abs() < 1e-13);
    }
}
