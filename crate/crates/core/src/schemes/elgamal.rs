// SPDX-License-Identifier: Apache-2.0

//! Header-free ElGamal variant.
//!
//! `p - 1 = r·s·k` with `gcd(r, s) = 1`, `a = s·k`, `b = r·k`. Messages live
//! in `gp(g^b)` (order `s`), masks in `gp(g^a)` (order `r`). Encryption is
//! `c = u·y^l` with `y = g^a`; decryption computes `(c^r)^t` with
//! `t = r^-1 mod s`, since `(g^(a·l))^r = g^((p-1)·l) = 1`.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;

use super::{check_modulus, Ciphertext};
use crate::groups::{find_element_of_order, Factorization};
use crate::numtheory;
use crate::paramgen::search_prime;
use crate::{Error, GroupElement, Result, RngState, SubgroupSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElGamalPublicKey {
    pub p: BigUint,
    pub g: GroupElement,
    pub y: GroupElement,
    pub gb: GroupElement,
}

impl ElGamalPublicKey {
    /// The announced message space `gp(g^b)`.
    pub fn message_subgroup(&self) -> SubgroupSpec {
        SubgroupSpec::public(&self.p, vec![self.gb.clone()]).expect("gb is modulo p")
    }

    /// The mask subgroup `gp(g^a)`.
    pub fn mask_subgroup(&self) -> SubgroupSpec {
        SubgroupSpec::public(&self.p, vec![self.y.clone()]).expect("y is modulo p")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElGamalSecretKey {
    pub r: BigUint,
    pub s: BigUint,
    pub a: BigUint,
    pub k: BigUint,
    pub t: BigUint,
    pub pm1: Factorization,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElGamalKeyPair {
    pub public: ElGamalPublicKey,
    pub secret: ElGamalSecretKey,
}

impl ElGamalKeyPair {
    /// Reassembles a keypair from stored parts, re-checking every structural
    /// identity: `p - 1 = r·s·k`, `a = s·k`, `g` a generator, `y = g^a`,
    /// `gb = g^(r·k)` and `t·r ≡ 1 (mod s)`.
    pub fn from_parts(public: ElGamalPublicKey, secret: ElGamalSecretKey) -> Result<Self> {
        let ElGamalPublicKey { p, g, y, gb } = &public;
        let ElGamalSecretKey { r, s, a, k, t, pm1 } = &secret;
        let bad = |what: &str| Err(Error::ParameterConflict(format!("elgamal key: {what}")));
        if pm1.value() != p - 1u32 || r * s * k != p - 1u32 {
            return bad("p - 1 != r·s·k");
        }
        if r <= &BigUint::one() || s <= &BigUint::one() || !r.gcd(s).is_one() {
            return bad("need r, s > 1 with gcd(r, s) = 1");
        }
        if a != &(s * k) {
            return bad("a != s·k");
        }
        for el in [g, y, gb] {
            check_modulus(el, p)?;
        }
        if !has_full_order(g, pm1) {
            return bad("g is not a generator");
        }
        if &g.pow(a) != y || &g.pow(&(r * k)) != gb {
            return bad("y or gb inconsistent with g");
        }
        if !(t * r % s).is_one() {
            return bad("t is not r^-1 mod s");
        }
        Ok(ElGamalKeyPair { public, secret })
    }
}

fn has_full_order(g: &GroupElement, pm1: &Factorization) -> bool {
    let order = pm1.value();
    g.pow(&order).is_one() && pm1.primes().all(|l| !g.pow(&(&order / l)).is_one())
}

/// Generates `p = 1 + r·s·k` with `k` even, a generator `g` of `F_p^*`, and
/// the derived key material. Rejects `r = 1`, `s = 1` and non-coprime pairs.
pub fn elgamal_keygen(r: &BigUint, s: &BigUint, bits: u64, rng: &mut RngState) -> Result<ElGamalKeyPair> {
    if r <= &BigUint::one() || s <= &BigUint::one() {
        return Err(Error::ParameterConflict("elgamal needs r > 1 and s > 1".into()));
    }
    if !r.gcd(s).is_one() {
        return Err(Error::ParameterConflict(format!("gcd({r}, {s}) != 1")));
    }
    let rs = r * s;
    let rs_factorization = Factorization::trial(&rs)
        .ok_or_else(|| Error::ParameterConflict(format!("{rs} does not factor by trial division")))?;
    let field = search_prime(&rs, &rs_factorization, bits, rng)?;
    let p = field.p().clone();
    let pm1 = field.pm1_factorization().clone();
    let p_minus_1 = &p - 1u32;
    let g = find_element_of_order(&p_minus_1, &p, &pm1, rng)?;
    let k = &p_minus_1 / &rs;
    let a = s * &k;
    let b = r * &k;
    let t = numtheory::mod_inv(r, s)?;
    let public = ElGamalPublicKey {
        y: g.pow(&a),
        gb: g.pow(&b),
        g,
        p,
    };
    let secret = ElGamalSecretKey {
        r: r.clone(),
        s: s.clone(),
        a,
        k,
        t,
        pm1,
    };
    Ok(ElGamalKeyPair { public, secret })
}

/// `c = u·y^l`, `l` uniform in `[1, p - 2]`.
pub fn elgamal_encrypt(public: &ElGamalPublicKey, u: &GroupElement, rng: &mut RngState) -> Result<Ciphertext> {
    let l = rng.gen_biguint_range(&BigUint::one(), &(&public.p - 1u32));
    elgamal_encrypt_with_nonce(public, u, &l)
}

pub fn elgamal_encrypt_with_nonce(public: &ElGamalPublicKey, u: &GroupElement, l: &BigUint) -> Result<Ciphertext> {
    check_modulus(u, &public.p)?;
    Ok(Ciphertext {
        value: u.mul(&public.y.pow(l))?,
    })
}

/// `(c^r)^t mod p`.
pub fn elgamal_decrypt(keys: &ElGamalKeyPair, c: &Ciphertext) -> Result<GroupElement> {
    check_modulus(&c.value, &keys.public.p)?;
    Ok(c.value.pow(&keys.secret.r).pow(&keys.secret.t))
}
