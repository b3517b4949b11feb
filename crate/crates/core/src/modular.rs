//! Multi-modular integer convolution for sparse products with large
//! coefficients: residues modulo word-sized primes, rebuilt by CRT.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashMap;

const PRIME_COUNT: usize = 320;
const PRIME_BITS: u64 = 31;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(p)) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022]
        .iter()
        .all(|&a| {
            let a = a % n;
            if a == 0 {
                return true;
            }
            let mut x = pow_mod(a, d, n);
            if x == 1 || x == n - 1 {
                return true;
            }
            for _ in 1..s {
                x = mul_mod(x, x, n);
                if x == n - 1 {
                    return true;
                }
            }
            false
        })
}

/// Primes just below `2^32`, largest first; all exceed `2^31`, so a product
/// of two residues fits in 64 bits and sums of them in a `u128` never overflow.
pub(crate) fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut c = (1u64 << 32) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

fn residue(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("reduced below p")
}

/// `Σ a_i b_j x^(k_i + k_j)` with exact integer coefficients, or `None` when
/// the coefficient bound needs more primes than are available.
pub(crate) fn convolve(a: &[(u128, BigInt)], b: &[(u128, BigInt)]) -> Option<Vec<(u128, BigInt)>> {
    let bits = |t: &[(u128, BigInt)]| t.iter().map(|(_, c)| c.bits()).max().unwrap_or(0);
    let len_bits = u64::from(usize::BITS - a.len().min(b.len()).leading_zeros());
    let need = bits(a) + bits(b) + len_bits + 2;
    let k = need.div_ceil(PRIME_BITS) as usize;
    let ps = primes().get(..k)?;

    let reduce = |t: &[(u128, BigInt)]| -> Vec<u64> {
        t.iter()
            .flat_map(|(_, c)| ps.iter().map(move |&p| residue(c, p)))
            .collect()
    };
    let (ra, rb) = (reduce(a), reduce(b));

    let mut index: FxHashMap<u128, usize> = FxHashMap::default();
    let mut keys: Vec<u128> = Vec::new();
    let mut acc: Vec<u128> = Vec::new();
    for (i, (ka, _)) in a.iter().enumerate() {
        let xa = &ra[i * k..(i + 1) * k];
        for (j, (kb, _)) in b.iter().enumerate() {
            let xb = &rb[j * k..(j + 1) * k];
            let key = ka + kb;
            let slot = *index.entry(key).or_insert_with(|| {
                keys.push(key);
                acc.resize(acc.len() + k, 0);
                keys.len() - 1
            });
            let dst = &mut acc[slot * k..(slot + 1) * k];
            for q in 0..k {
                dst[q] += u128::from(xa[q] * xb[q]);
            }
        }
    }

    // Garner's mixed-radix reconstruction, then the symmetric range.
    let inv: Vec<Vec<u64>> = (0..k)
        .map(|i| (0..i).map(|j| pow_mod(ps[j] % ps[i], ps[i] - 2, ps[i])).collect())
        .collect();
    let mut radix = Vec::with_capacity(k);
    let mut m = BigInt::from(1);
    for &p in ps {
        radix.push(m.clone());
        m *= p;
    }
    let half = &m >> 1;
    let mut digits = vec![0u64; k];
    let out = keys
        .into_iter()
        .enumerate()
        .filter_map(|(slot, key)| {
            let r = &acc[slot * k..(slot + 1) * k];
            for i in 0..k {
                let p = ps[i];
                let mut t = (r[i] % u128::from(p)) as u64;
                for j in 0..i {
                    t = mul_mod((t + p - digits[j] % p) % p, inv[i][j], p);
                }
                digits[i] = t;
            }
            let mut x = BigInt::zero();
            for (d, w) in digits.iter().zip(&radix) {
                if *d != 0 {
                    x += w * *d;
                }
            }
            if x > half {
                x -= &m;
            }
            (!x.is_zero()).then_some((key, x))
        })
        .collect();
    Some(out)
}
