// SPDX-License-Identifier: Apache-2.0

//! Basic ring scheme combined with RSA: `c = (h·u)^e mod n`, `u = c^d`.
//!
//! Here `t_H` is the exponent of the mask subgroup `H` and `r_U` that of the
//! message subgroup `U`. With `d₁ = (t_H·e)^-1 mod r_U` and `d = t_H·d₁`,
//! `c^d = (h^t_H)^(e·d₁) · u^(t_H·e·d₁) = u`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::{check_modulus, Ciphertext};
use crate::groups::random_subgroup_element;
use crate::numtheory;
use crate::paramgen::{MaskParams, Platform};
use crate::{Error, GroupElement, Result, RngState, SubgroupSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaMaskPublicKey {
    pub n: BigUint,
    pub h: SubgroupSpec,
    pub u: SubgroupSpec,
    pub e: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaMaskKeyPair {
    params: MaskParams,
    e: BigUint,
    d1: BigUint,
    d: BigUint,
}

impl RsaMaskKeyPair {
    pub fn params(&self) -> &MaskParams {
        &self.params
    }

    pub fn e(&self) -> &BigUint {
        &self.e
    }

    pub fn d1(&self) -> &BigUint {
        &self.d1
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn public(&self) -> RsaMaskPublicKey {
        RsaMaskPublicKey {
            n: self.params.modulus().clone(),
            h: self.params.mask_subgroup().public_view(),
            u: self.params.message_subgroup().public_view(),
            e: self.e.clone(),
        }
    }
}

/// Derives `d₁` and `d` for public exponent `e`. Requires ring parameters
/// and `gcd(e, r_U) = 1`.
pub fn rsa_mask_keygen(params: MaskParams, e: &BigUint) -> Result<RsaMaskKeyPair> {
    if !matches!(params.platform(), Platform::Ring(_)) {
        return Err(Error::ParameterConflict("rsa-mask needs a ring platform".into()));
    }
    let t_h = params.r();
    let r_u = params.s();
    if e.bits() == 0 || !e.gcd(r_u).is_one() {
        return Err(Error::BadPublicExponent);
    }
    let d1 = if r_u.is_one() {
        BigUint::one()
    } else {
        numtheory::mod_inv(&((t_h * e) % r_u), r_u)?
    };
    let d = t_h * &d1;
    Ok(RsaMaskKeyPair {
        e: e.clone(),
        d1,
        d,
        params,
    })
}

pub fn rsa_mask_encrypt(public: &RsaMaskPublicKey, u: &GroupElement, rng: &mut RngState) -> Result<Ciphertext> {
    check_modulus(u, &public.n)?;
    let h = random_subgroup_element(&public.h, rng)?;
    rsa_mask_encrypt_with_mask(public, u, &h)
}

pub fn rsa_mask_encrypt_with_mask(public: &RsaMaskPublicKey, u: &GroupElement, h: &GroupElement) -> Result<Ciphertext> {
    check_modulus(u, &public.n)?;
    check_modulus(h, &public.n)?;
    Ok(Ciphertext {
        value: h.mul(u)?.pow(&public.e),
    })
}

pub fn rsa_mask_decrypt(keys: &RsaMaskKeyPair, c: &Ciphertext) -> Result<GroupElement> {
    check_modulus(&c.value, keys.params.modulus())?;
    Ok(c.value.pow(&keys.d))
}
