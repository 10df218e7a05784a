// SPDX-License-Identifier: Apache-2.0

//! Probabilistic Diffie-Hellman variant.
//!
//! Bob holds `r` and publishes `r₁ = r·x`; Alice holds `s` and publishes
//! `s₁ = s·y`; both work in `F_p` with `p = 1 + 2·r₁·s₁·z`. Bob publishes
//! `H` of exponent `r`, Alice publishes `U` of exponent `s`. Bob sends
//! `u·g^(b·r)` with `u ∈ U`, Alice sends `h·g^(a·s)` with `h ∈ H`, and each
//! raises what they receive to their own `prescribed·scalar`, landing on
//! `g^(a·b·r·s)`.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;

use super::check_modulus;
use crate::groups::{find_element_of_order, random_subgroup_element, Factorization};
use crate::paramgen::search_prime;
use crate::{Error, GroupElement, Result, RngState, SubgroupSpec};

/// Upper bound on the bits of the public blinding multipliers `x`, `y`.
const MAX_BLIND_BITS: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DhPublic {
    pub p: BigUint,
    pub g: GroupElement,
    pub r1: BigUint,
    pub s1: BigUint,
    pub h: SubgroupSpec,
    pub u: SubgroupSpec,
}

/// Session setup with each party's prescribed exponent. `h` and `u` keep
/// their secret orders; [`DhSession::public`] strips them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DhSession {
    pub p: BigUint,
    pub g: GroupElement,
    pub r1: BigUint,
    pub s1: BigUint,
    pub h: SubgroupSpec,
    pub u: SubgroupSpec,
    pub r: BigUint,
    pub s: BigUint,
    pub pm1: Factorization,
}

impl DhSession {
    pub fn public(&self) -> DhPublic {
        DhPublic {
            p: self.p.clone(),
            g: self.g.clone(),
            r1: self.r1.clone(),
            s1: self.s1.clone(),
            h: self.h.public_view(),
            u: self.u.public_view(),
        }
    }

    /// Bob's per-exchange coins: `b ∈ [1, p-2]` and `u ∈ U`.
    pub fn sample_bob(&self, rng: &mut RngState) -> Result<(BigUint, GroupElement)> {
        let b = rng.gen_biguint_range(&BigUint::one(), &(&self.p - 1u32));
        Ok((b, random_subgroup_element(&self.u, rng)?))
    }

    /// Alice's per-exchange coins: `a ∈ [1, p-2]` and `h ∈ H`.
    pub fn sample_alice(&self, rng: &mut RngState) -> Result<(BigUint, GroupElement)> {
        let a = rng.gen_biguint_range(&BigUint::one(), &(&self.p - 1u32));
        Ok((a, random_subgroup_element(&self.h, rng)?))
    }
}

fn prime_power_subgroup(exponent: &BigUint, p: &BigUint, rng: &mut RngState) -> Result<SubgroupSpec> {
    let factorization = Factorization::trial(exponent)
        .ok_or_else(|| Error::ParameterConflict(format!("{exponent} does not factor by trial division")))?;
    let orders = factorization.prime_powers();
    if orders.is_empty() {
        return Ok(SubgroupSpec::trivial(p));
    }
    let generators = orders
        .iter()
        .map(|o| {
            let f = Factorization::trial(o).expect("prime power of a factored value");
            find_element_of_order(o, p, &f, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    SubgroupSpec::with_secret_orders(p, generators, orders)
}

/// Builds the shared prime, a generator `g` of `F_p^*`, and the published
/// subgroups `H` (exponent `r`) and `U` (exponent `s`).
pub fn dh_setup(r: &BigUint, s: &BigUint, bits: u64, rng: &mut RngState) -> Result<DhSession> {
    if r.bits() == 0 || s.bits() == 0 {
        return Err(Error::InvalidArgument("r and s must be >= 1".into()));
    }
    if !r.gcd(s).is_one() {
        return Err(Error::ParameterConflict(format!("gcd({r}, {s}) != 1")));
    }
    let free_bits = bits.saturating_sub(((r * s) << 1u32).bits());
    let blind_bits = (free_bits / 4).min(MAX_BLIND_BITS);
    let blind_hi = (BigUint::one() << blind_bits) + 1u32;
    let x = rng.gen_biguint_range(&BigUint::one(), &blind_hi);
    let y = rng.gen_biguint_range(&BigUint::one(), &blind_hi);
    let r1 = r * &x;
    let s1 = s * &y;
    let rs1 = &r1 * &s1;
    let rs1_factorization = Factorization::trial(&rs1)
        .ok_or_else(|| Error::ParameterConflict(format!("{rs1} does not factor by trial division")))?;
    let field = search_prime(&rs1, &rs1_factorization, bits, rng)?;
    let p = field.p().clone();
    let pm1 = field.pm1_factorization().clone();
    let g = find_element_of_order(&(&p - 1u32), &p, &pm1, rng)?;
    let h = prime_power_subgroup(r, &p, rng)?;
    let u = prime_power_subgroup(s, &p, rng)?;
    Ok(DhSession {
        p,
        g,
        r1,
        s1,
        h,
        u,
        r: r.clone(),
        s: s.clone(),
        pm1,
    })
}

/// Bob's wire message `u·g^(b·r)`.
pub fn dh_bob_message(public: &DhPublic, r: &BigUint, b: &BigUint, u: &GroupElement) -> Result<GroupElement> {
    check_modulus(u, &public.p)?;
    u.mul(&public.g.pow(&(b * r)))
}

/// Alice's wire message `h·g^(a·s)`.
pub fn dh_alice_message(public: &DhPublic, s: &BigUint, a: &BigUint, h: &GroupElement) -> Result<GroupElement> {
    check_modulus(h, &public.p)?;
    h.mul(&public.g.pow(&(a * s)))
}

/// `received^(prescribed·scalar)`.
pub fn dh_derive(received: &GroupElement, own_secret_scalar: &BigUint, own_prescribed: &BigUint) -> GroupElement {
    received.pow(&(own_prescribed * own_secret_scalar))
}
