// SPDX-License-Identifier: Apache-2.0

//! Arbitrary-precision number theory: modular arithmetic, gcd/lcm, modular
//! inverse, CRT, Miller-Rabin primality and constrained prime search.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result, RngState};

/// Default Miller-Rabin round count for generated key material.
pub const DEFAULT_MR_ROUNDS: usize = 64;

/// Trial-division bound used when certifying factorizations.
pub const SMOOTH_BOUND: u32 = 1 << 20;

// Miller-Rabin with these bases is exact for every n < 3.18e23 > 2^64.
const DETERMINISTIC_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn sieve(bound: u32) -> Vec<u32> {
    let bound = bound as usize;
    let mut composite = vec![false; bound];
    let mut primes = Vec::new();
    for i in 2..bound {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j < bound {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// All primes below [`SMOOTH_BOUND`], ascending.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(SMOOTH_BOUND))
}

fn primes_below_1000() -> &'static [u32] {
    let all = small_primes();
    let end = all.partition_point(|&p| p < 1000);
    &all[..end]
}

pub fn mod_pow(base: &BigUint, exp: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m < &BigUint::from(2u8) {
        return Err(Error::InvalidModulus);
    }
    Ok(base.modpow(exp, m))
}

/// Extended Euclid: returns `(g, u, v)` with `u·a + v·b = g = gcd(a, b)`.
pub fn ext_gcd(a: &BigUint, b: &BigUint) -> Result<(BigUint, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::UndefinedGcd);
    }
    let (mut old_r, mut r) = (BigInt::from(a.clone()), BigInt::from(b.clone()));
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    let g = old_r
        .to_biguint()
        .expect("remainders of non-negative inputs stay non-negative");
    Ok((g, old_s, old_t))
}

/// Inverse of `a` modulo `m`, in `[1, m-1]`.
pub fn mod_inv(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m < &BigUint::from(2u8) {
        return Err(Error::InvalidModulus);
    }
    let (g, u, _) = ext_gcd(&(a % m), m)?;
    if !g.is_one() {
        return Err(Error::NotInvertible { gcd: g });
    }
    let m_signed = BigInt::from(m.clone());
    let mut u = u % &m_signed;
    if u.is_negative() {
        u += &m_signed;
    }
    Ok(u.to_biguint().expect("normalized into [0, m)"))
}

/// Inverse modulo a group exponent, where exponent 1 (the trivial group)
/// admits any representative; 1 is returned in that case.
pub(crate) fn inv_mod_exponent(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m.is_one() {
        Ok(BigUint::one())
    } else {
        mod_inv(a, m)
    }
}

pub fn lcm(a: &BigUint, b: &BigUint) -> Result<BigUint> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidArgument("lcm of zero".into()));
    }
    Ok(a.lcm(b))
}

/// Least common multiple of a nonempty list of positive integers.
pub fn lcm_all(values: &[BigUint]) -> Result<BigUint> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("lcm of empty list".into()));
    }
    values.iter().try_fold(BigUint::one(), |acc, v| lcm(&acc, v))
}

/// Unique `x ∈ [0, m1·m2)` with `x ≡ a1 (mod m1)` and `x ≡ a2 (mod m2)`.
pub fn crt_pair(a1: &BigUint, m1: &BigUint, a2: &BigUint, m2: &BigUint) -> Result<BigUint> {
    if m1.is_zero() || m2.is_zero() || !m1.gcd(m2).is_one() {
        return Err(Error::CrtModuli);
    }
    if m2.is_one() {
        return Ok(a1 % m1);
    }
    let a1 = a1 % m1;
    let a2 = a2 % m2;
    let inv = inv_mod_exponent(&(m1 % m2), m2)?;
    // (a2 - a1) mod m2, kept non-negative
    let diff = (&a2 + m2 - (&a1 % m2)) % m2;
    let k = (diff * inv) % m2;
    Ok(a1 + m1 * k)
}

fn miller_rabin_round(n: &BigUint, n_minus_1: &BigUint, d: &BigUint, s: u64, base: &BigUint) -> bool {
    let mut x = base.modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Miller-Rabin preceded by trial division by the primes below 1000.
///
/// Candidates up to 64 bits use a fixed base set and the answer is exact;
/// larger candidates use `rounds` random bases drawn from `rng`.
pub fn is_probable_prime(m: &BigUint, rounds: usize, rng: &mut RngState) -> bool {
    if let Some(small) = m.to_u32() {
        if small < 1000 {
            return primes_below_1000().binary_search(&small).is_ok();
        }
    }
    for &p in primes_below_1000() {
        if (m % p).is_zero() {
            return false;
        }
    }
    if m < &BigUint::from(1_000_000u32) {
        return true;
    }

    let n_minus_1 = m - 1u32;
    let s = n_minus_1
        .trailing_zeros()
        .expect("n - 1 is nonzero for n >= 1000");
    let d = &n_minus_1 >> s;

    if m.bits() <= 64 {
        return DETERMINISTIC_BASES
            .iter()
            .all(|&b| miller_rabin_round(m, &n_minus_1, &d, s, &BigUint::from(b)));
    }

    let lo = BigUint::from(2u8);
    let hi = &n_minus_1; // exclusive, so bases land in [2, m - 2]
    (0..rounds.max(1)).all(|_| {
        let base = rng.gen_biguint_range(&lo, hi);
        miller_rabin_round(m, &n_minus_1, &d, s, &base)
    })
}

/// Primality check for parameter validation, independent of caller streams.
pub(crate) fn is_prime_checked(m: &BigUint) -> bool {
    let mut rng = RngState::from_seed(0x5e_ed0f_9e1d);
    is_probable_prime(m, DEFAULT_MR_ROUNDS, &mut rng)
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    a.div_ceil(b)
}

/// Searches for a prime `p = 1 + 2·r·x` of exactly `bits` bits.
///
/// `x` is drawn uniformly from the range that pins the bit length:
/// `[⌈2^(bits-1) / 2r⌉, ⌊(2^bits - 2) / 2r⌋]`. Gives up after `64·bits`
/// candidates.
pub fn gen_prime_with_factor(
    r: &BigUint,
    bits: u64,
    rng: &mut RngState,
) -> Result<(BigUint, BigUint)> {
    if r.is_zero() {
        return Err(Error::InvalidArgument("prime factor r must be >= 1".into()));
    }
    if bits < 2 {
        return Err(Error::InvalidArgument("prime size must be at least 2 bits".into()));
    }
    let two_r = r << 1u32;
    let lo = ceil_div(&(BigUint::one() << (bits - 1)), &two_r).max(BigUint::one());
    let hi = ((BigUint::one() << bits) - 2u32) / &two_r;
    if lo > hi {
        return Err(Error::SearchFailure(format!(
            "no {bits}-bit integer of the form 1 + 2·{r}·x"
        )));
    }
    let hi_exclusive = &hi + 1u32;
    for _ in 0..64 * bits {
        let x = rng.gen_biguint_range(&lo, &hi_exclusive);
        let p = &two_r * &x + 1u32;
        if is_probable_prime(&p, DEFAULT_MR_ROUNDS, rng) {
            return Ok((p, x));
        }
    }
    Err(Error::SearchFailure(format!(
        "no {bits}-bit prime of the form 1 + 2·{r}·x within {} attempts",
        64 * bits
    )))
}

/// Factors `n` by trial division below [`SMOOTH_BOUND`], accepting one
/// leftover cofactor when it is (probably) prime. Returns ascending
/// `(prime, multiplicity)` pairs, or `None` when `n` does not split.
pub(crate) fn trial_factor(n: &BigUint) -> Option<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return None;
    }
    let mut rest = n.clone();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        let p_big = BigUint::from(p);
        if &p_big * &p_big > rest {
            break;
        }
        let mut mult = 0u32;
        loop {
            let (q, rem) = rest.div_rem(&p_big);
            if !rem.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            factors.push((p_big, mult));
        }
    }
    if !rest.is_one() {
        let bound_sq = BigUint::from(SMOOTH_BOUND as u64 * SMOOTH_BOUND as u64);
        // No factor below the bound survives, so a cofactor under bound² is prime.
        if rest < bound_sq || is_prime_checked(&rest) {
            match factors.last_mut() {
                Some((p, m)) if *p == rest => *m += 1,
                _ => factors.push((rest, 1)),
            }
        } else {
            return None;
        }
    }
    Some(factors)
}
