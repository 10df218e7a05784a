// SPDX-License-Identifier: Apache-2.0

//! Exhaustive-search oracles for the order, exponent, membership and
//! quadratic-residuosity problems, plus the two-message distinguishing game.
//!
//! These are small-group baselines: every oracle walks the group and refuses
//! to run past its cap.

use std::collections::BTreeSet;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;
use rand::Rng;

use crate::groups::{enumerate_subgroup, random_subgroup_element};
use crate::numtheory::is_prime_checked;
use crate::schemes::{elgamal_encrypt, mask_encrypt, Ciphertext, ElGamalPublicKey, MaskPublicKey};
use crate::{Error, GroupElement, Result, RngState, SubgroupSpec};

/// Default cap for enumeration and multiplication walks.
pub const DEFAULT_CAP: u64 = 1 << 20;

/// Order of `g` by successive multiplication.
pub fn brute_order(g: &GroupElement, cap: u64) -> Result<BigUint> {
    let mut x = g.clone();
    let mut steps = 1u64;
    while !x.is_one() {
        if steps >= cap {
            return Err(Error::TooLarge { cap });
        }
        x = x.mul(g)?;
        steps += 1;
    }
    Ok(BigUint::from(steps))
}

/// Exponent of `H` as the lcm of the orders of all its elements.
///
/// Each element's cyclic orbit is walked once; every power met on the walk
/// has an order dividing the walk length, so it needs no walk of its own.
pub fn brute_exponent(h: &SubgroupSpec, cap: u64) -> Result<BigUint> {
    let elements = enumerate_subgroup(h, cap)?;
    let mut covered = BTreeSet::new();
    let mut exponent = BigUint::one();
    for x in &elements {
        if covered.contains(x) {
            continue;
        }
        let mut y = x.clone();
        let mut steps = 1u64;
        while !y.is_one() {
            covered.insert(y.clone());
            y = y.mul(x)?;
            steps += 1;
        }
        exponent = exponent.lcm(&BigUint::from(steps));
    }
    Ok(exponent)
}

pub fn brute_membership(f: &GroupElement, h: &SubgroupSpec, cap: u64) -> Result<bool> {
    Ok(enumerate_subgroup(h, cap)?.contains(f))
}

/// Quadratic residuosity with the factors known: Euler's criterion modulo
/// each prime.
pub fn qr_by_euler(f: &GroupElement, p: &BigUint, q: &BigUint) -> Result<bool> {
    if &(p * q) != f.modulus() || p == q || !is_prime_checked(p) || !is_prime_checked(q) {
        return Err(Error::InconsistentFactorization(format!(
            "{p}·{q} is not a factorization of {} into distinct primes",
            f.modulus()
        )));
    }
    let euler = |prime: &BigUint| {
        let half = (prime - 1u32) >> 1u32;
        (f.residue() % prime).modpow(&half, prime).is_one()
    };
    Ok(euler(p) && euler(q))
}

/// Quadratic residuosity from an order oracle: for `n = p·q` with
/// `p ≡ q ≡ 3 (mod 4)`, `f` is a square iff its order is odd.
pub fn qr_by_order<F>(f: &GroupElement, order_oracle: F) -> Result<bool>
where
    F: FnOnce(&GroupElement) -> Result<BigUint>,
{
    Ok(order_oracle(f)?.is_odd())
}

/// Squares modulo `n` by exhaustive squaring. Reference for QR oracles.
pub fn brute_squares(n: &BigUint, cap: u64) -> Result<BTreeSet<GroupElement>> {
    if n.bits() > 63 || n > &BigUint::from(cap) {
        return Err(Error::TooLarge { cap });
    }
    let n_small: u64 = n.try_into().expect("checked above");
    let mut out = BTreeSet::new();
    for w in 1..n_small {
        if num_integer::gcd(w, n_small) == 1 {
            out.insert(GroupElement::new(BigUint::from(w * w % n_small), n.clone())?);
        }
    }
    Ok(out)
}

/// Outcome of the distinguishing game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndGameResult {
    pub trials: u64,
    pub adversary_wins: u64,
}

impl IndGameResult {
    /// `|wins/trials - 1/2|`.
    pub fn advantage(&self) -> f64 {
        (self.adversary_wins as f64 / self.trials as f64 - 0.5).abs()
    }
}

/// A public key the distinguishing game can run against.
pub trait IndScheme {
    /// A message sampled from the announced message space using public data.
    fn sample_message(&self, rng: &mut RngState) -> Result<GroupElement>;
    fn encrypt(&self, u: &GroupElement, rng: &mut RngState) -> Result<Ciphertext>;
}

impl IndScheme for ElGamalPublicKey {
    /// `gb^x` with `x` uniform mod `p - 1`, which is exactly uniform on `gp(gb)`.
    fn sample_message(&self, rng: &mut RngState) -> Result<GroupElement> {
        let x = rng.gen_biguint_below(&(&self.p - 1u32));
        Ok(self.gb.pow(&x))
    }

    fn encrypt(&self, u: &GroupElement, rng: &mut RngState) -> Result<Ciphertext> {
        elgamal_encrypt(self, u, rng)
    }
}

impl IndScheme for MaskPublicKey {
    fn sample_message(&self, rng: &mut RngState) -> Result<GroupElement> {
        random_subgroup_element(&self.u, rng)
    }

    fn encrypt(&self, u: &GroupElement, rng: &mut RngState) -> Result<Ciphertext> {
        mask_encrypt(self, u, rng)
    }
}

const DISTINCT_MESSAGE_ATTEMPTS: usize = 1000;

/// Runs the two-message game `trials` times. Each trial draws fresh
/// `u₀ ≠ u₁`, a uniform bit `i`, encrypts `u_i` and asks the adversary for
/// `i`. The adversary is called as `(pk, u₀, u₁, c, coins)` and returns its
/// guess; it keeps no state between trials.
pub fn ind_game<S, A>(scheme: &S, adversary: A, trials: u64, rng: &mut RngState) -> Result<IndGameResult>
where
    S: IndScheme,
    A: Fn(&S, &GroupElement, &GroupElement, &Ciphertext, &mut RngState) -> usize,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut wins = 0u64;
    for _ in 0..trials {
        let u0 = scheme.sample_message(rng)?;
        let mut u1 = scheme.sample_message(rng)?;
        let mut attempts = 0;
        while u1 == u0 {
            attempts += 1;
            if attempts > DISTINCT_MESSAGE_ATTEMPTS {
                return Err(Error::InvalidArgument("message space has fewer than two elements".into()));
            }
            u1 = scheme.sample_message(rng)?;
        }
        let i = usize::from(rng.gen::<bool>());
        let c = scheme.encrypt(if i == 0 { &u0 } else { &u1 }, rng)?;
        let mut coins = rng.split();
        if adversary(scheme, &u0, &u1, &c, &mut coins) == i {
            wins += 1;
        }
    }
    Ok(IndGameResult {
        trials,
        adversary_wins: wins,
    })
}

/// Guesses uniformly at random.
pub fn random_adversary<S>(_: &S, _: &GroupElement, _: &GroupElement, _: &Ciphertext, coins: &mut RngState) -> usize {
    usize::from(coins.gen::<bool>())
}

/// Always answers 0.
pub fn constant_adversary<S>(_: &S, _: &GroupElement, _: &GroupElement, _: &Ciphertext, _: &mut RngState) -> usize {
    0
}

/// Distinguisher for the ElGamal variant that solves membership in the
/// mask subgroup `gp(y)` by enumeration: `u₀^-1·c ∈ gp(y)` iff `c` hides `u₀`.
#[derive(Clone, Debug)]
pub struct MembershipAdversary {
    mask_elements: BTreeSet<GroupElement>,
}

impl MembershipAdversary {
    pub fn new(public: &ElGamalPublicKey, cap: u64) -> Result<Self> {
        Ok(MembershipAdversary {
            mask_elements: enumerate_subgroup(&public.mask_subgroup(), cap)?,
        })
    }

    pub fn guess(&self, u0: &GroupElement, c: &Ciphertext) -> usize {
        let unmasked = u0.inverse().mul(&c.value).expect("same modulus");
        if self.mask_elements.contains(&unmasked) {
            0
        } else {
            1
        }
    }
}

/// Fresh check of `f ∈ H` for the game's membership criterion, without a
/// precomputed table.
pub fn membership_guess(public: &ElGamalPublicKey, u0: &GroupElement, c: &Ciphertext, cap: u64) -> Result<usize> {
    let unmasked = u0.inverse().mul(&c.value)?;
    Ok(if brute_membership(&unmasked, &public.mask_subgroup(), cap)? { 0 } else { 1 })
}

/// Agreement check used in tests and the CLI: the factorization-based
/// exponent of `H` against the enumerated one.
pub fn exponent_agrees(h: &SubgroupSpec, group_order: &crate::Factorization, cap: u64) -> Result<bool> {
    Ok(crate::groups::subgroup_exponent(h, group_order)? == brute_exponent(h, cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{ElGamalKeyPair, ElGamalSecretKey};
    use crate::Factorization;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn el(r: u64, m: u64) -> GroupElement {
        GroupElement::new(big(r), big(m)).unwrap()
    }

    fn toy_elgamal() -> ElGamalKeyPair {
        let g = el(3, 31);
        ElGamalKeyPair::from_parts(
            ElGamalPublicKey {
                p: big(31),
                y: g.pow(&big(10)),
                gb: g.pow(&big(6)),
                g,
            },
            ElGamalSecretKey {
                r: big(3),
                s: big(5),
                a: big(10),
                k: big(2),
                t: big(2),
                pm1: "2*3*5".parse().unwrap(),
            },
        )
        .unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(brute_order(&el(2, 7), 100).unwrap(), big(3));
        assert_eq!(brute_order(&el(1, 77), 100).unwrap(), big(1));
        assert_eq!(brute_order(&el(3, 31), 100).unwrap(), big(30));
        assert_eq!(brute_order(&el(3, 31), 10), Err(Error::TooLarge { cap: 10 }));
    }

    #[test]
    fn exponent_examples() {
        let h = SubgroupSpec::public(&big(77), vec![el(23, 77), el(36, 77)]).unwrap();
        let orders: BTreeSet<BigUint> = enumerate_subgroup(&h, 100)
            .unwrap()
            .iter()
            .map(|x| brute_order(x, 100).unwrap())
            .collect();
        assert_eq!(orders, [1u64, 3, 5, 15].into_iter().map(big).collect());
        assert_eq!(brute_exponent(&h, 100).unwrap(), big(15));
        assert_eq!(brute_exponent(&SubgroupSpec::trivial(&big(31)), 100).unwrap(), big(1));
        let h = SubgroupSpec::public(&big(31), vec![el(2, 31)]).unwrap();
        assert_eq!(brute_exponent(&h, 100).unwrap(), big(5));
    }

    #[test]
    fn membership_examples() {
        let h5 = SubgroupSpec::public(&big(31), vec![el(5, 31)]).unwrap();
        assert!(brute_membership(&el(5, 31), &h5, 100).unwrap());
        assert!(!brute_membership(&el(2, 31), &h5, 100).unwrap());
        let h23 = SubgroupSpec::public(&big(77), vec![el(23, 77)]).unwrap();
        assert!(brute_membership(&el(67, 77), &h23, 100).unwrap());
    }

    #[test]
    fn qr_examples() {
        assert!(qr_by_euler(&el(4, 77), &big(7), &big(11)).unwrap());
        assert!(!qr_by_euler(&el(2, 77), &big(7), &big(11)).unwrap());
        assert!(qr_by_euler(&el(1, 77), &big(7), &big(11)).unwrap());
        assert!(qr_by_euler(&el(1, 77), &big(7), &big(13)).is_err());
        assert!(qr_by_euler(&el(1, 77), &big(77), &big(1)).is_err());

        let by_order = |x: u64| qr_by_order(&el(x, 77), |g| brute_order(g, 1000)).unwrap();
        assert_eq!(brute_order(&el(4, 77), 100).unwrap(), big(15));
        assert_eq!(brute_order(&el(2, 77), 100).unwrap(), big(30));
        assert!(by_order(4));
        assert!(!by_order(2));
        assert!(by_order(1));
    }

    #[test]
    fn euler_matches_square_search() {
        let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];
        for (i, &p) in primes.iter().enumerate() {
            for &q in &primes[i + 1..] {
                let n = big(p * q);
                if p * q >= 1 << 12 {
                    continue;
                }
                let squares = brute_squares(&n, 1 << 12).unwrap();
                for f in (1..p * q).filter(|f| num_integer::gcd(*f, p * q) == 1) {
                    let f = el(f, p * q);
                    assert_eq!(qr_by_euler(&f, &big(p), &big(q)).unwrap(), squares.contains(&f));
                }
            }
        }
    }

    #[test]
    fn odd_order_iff_square_for_three_mod_four_primes() {
        let primes = [3u64, 7, 11, 19, 23];
        for &p in &primes {
            for &q in &primes {
                if p == q {
                    continue;
                }
                for f in (1..p * q).filter(|f| num_integer::gcd(*f, p * q) == 1) {
                    let f = el(f, p * q);
                    let by_order = qr_by_order(&f, |g| brute_order(g, DEFAULT_CAP)).unwrap();
                    assert_eq!(by_order, qr_by_euler(&f, &big(p), &big(q)).unwrap(), "{f} mod {}", p * q);
                }
            }
        }
    }

    #[test]
    fn odd_order_criterion_needs_three_mod_four() {
        // with 5 ≡ 13 ≡ 1 (mod 4) some square has even order
        let n = 5 * 13;
        let counterexample = (1..n)
            .filter(|f| num_integer::gcd(*f, n) == 1)
            .map(|f| el(f, n))
            .find(|f| {
                qr_by_euler(f, &big(5), &big(13)).unwrap() != qr_by_order(f, |g| brute_order(g, 100)).unwrap()
            });
        assert!(counterexample.is_some());
    }

    #[test]
    fn exponent_oracles_agree() {
        let phi: Factorization = "2^2*3*5".parse().unwrap();
        let h = SubgroupSpec::public(&big(77), vec![el(23, 77), el(36, 77)]).unwrap();
        assert!(exponent_agrees(&h, &phi, 1 << 12).unwrap());
        let h = SubgroupSpec::public(&big(77), vec![el(2, 77), el(76, 77)]).unwrap();
        assert!(exponent_agrees(&h, &phi, 1 << 12).unwrap());
    }

    #[test]
    fn game_examples() {
        let keys = toy_elgamal();
        let public = &keys.public;
        let mut rng = RngState::from_seed(5);
        let adversary = MembershipAdversary::new(public, DEFAULT_CAP).unwrap();
        let result = ind_game(public, |_, u0, _, c, _| adversary.guess(u0, c), 1000, &mut rng).unwrap();
        assert_eq!(result.adversary_wins, 1000);
        assert_eq!(result.advantage(), 0.5);

        let result = ind_game(public, |pk, u0, _, c, _| membership_guess(pk, u0, c, 1 << 12).unwrap(), 200, &mut rng).unwrap();
        assert_eq!(result.adversary_wins, 200);

        let result = ind_game(public, random_adversary, 10_000, &mut rng).unwrap();
        assert!(result.advantage() <= 0.05, "{result:?}");
        let result = ind_game(public, constant_adversary, 10_000, &mut rng).unwrap();
        assert!(result.advantage() <= 0.05, "{result:?}");

        assert!(matches!(ind_game(public, random_adversary, 0, &mut rng), Err(Error::InvalidArgument(_))));
    }
}
