// SPDX-License-Identifier: Apache-2.0

//! Basic scheme, field and ring versions: `c = h·u`, `u = c^(r·t)`.

use num_bigint::BigUint;

use super::{check_modulus, Ciphertext};
use crate::groups::random_subgroup_element;
use crate::paramgen::MaskParams;
use crate::{GroupElement, Result, RngState, SubgroupSpec};

/// What the receiver publishes: the modulus and generator lists of `H` and `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskPublicKey {
    pub modulus: BigUint,
    pub h: SubgroupSpec,
    pub u: SubgroupSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskKeyPair {
    params: MaskParams,
    d: BigUint,
}

impl MaskKeyPair {
    pub fn params(&self) -> &MaskParams {
        &self.params
    }

    /// Decryption exponent `d = r·t`.
    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn public(&self) -> MaskPublicKey {
        MaskPublicKey {
            modulus: self.params.modulus().clone(),
            h: self.params.mask_subgroup().public_view(),
            u: self.params.message_subgroup().public_view(),
        }
    }
}

pub fn mask_keygen(params: MaskParams) -> MaskKeyPair {
    let d = params.r() * params.t();
    MaskKeyPair { params, d }
}

pub fn mask_encrypt(public: &MaskPublicKey, u: &GroupElement, rng: &mut RngState) -> Result<Ciphertext> {
    check_modulus(u, &public.modulus)?;
    let h = random_subgroup_element(&public.h, rng)?;
    mask_encrypt_with_mask(public, u, &h)
}

/// Encryption with caller-chosen mask `h`.
pub fn mask_encrypt_with_mask(public: &MaskPublicKey, u: &GroupElement, h: &GroupElement) -> Result<Ciphertext> {
    check_modulus(u, &public.modulus)?;
    check_modulus(h, &public.modulus)?;
    Ok(Ciphertext { value: h.mul(u)? })
}

/// `c^(r·t)`. Returns the plaintext whenever `c = h·u` with `h ∈ H`, `u ∈ U`;
/// any other element decrypts to an unrelated element.
pub fn mask_decrypt(keys: &MaskKeyPair, c: &Ciphertext) -> Result<GroupElement> {
    check_modulus(&c.value, keys.params.modulus())?;
    Ok(c.value.pow(&keys.d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::enumerate_subgroup;
    use crate::paramgen::{build_field_mask_params, build_ring_with_orders, FieldParams, Platform, RingParams};

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn el(r: u64, m: u64) -> GroupElement {
        GroupElement::new(big(r), big(m)).unwrap()
    }

    fn f31_keys() -> MaskKeyPair {
        let p = big(31);
        let field = FieldParams::new(p.clone(), "2*3*5".parse().unwrap()).unwrap();
        let h = SubgroupSpec::with_secret_orders(&p, vec![el(5, 31)], vec![big(3)]).unwrap();
        let u = SubgroupSpec::with_secret_orders(&p, vec![el(2, 31)], vec![big(5)]).unwrap();
        mask_keygen(MaskParams::new(Platform::Field(field), h, u).unwrap())
    }

    fn z77_keys() -> MaskKeyPair {
        let n = big(77);
        let ring = RingParams::new(
            FieldParams::new(big(7), "2*3".parse().unwrap()).unwrap(),
            FieldParams::new(big(11), "2*5".parse().unwrap()).unwrap(),
        )
        .unwrap();
        let h = SubgroupSpec::with_secret_orders(&n, vec![el(23, 77)], vec![big(3)]).unwrap();
        let u = SubgroupSpec::with_secret_orders(&n, vec![el(36, 77)], vec![big(5)]).unwrap();
        mask_keygen(MaskParams::new(Platform::Ring(ring), h, u).unwrap())
    }

    #[test]
    fn keygen_examples() {
        let k = f31_keys();
        assert_eq!(
            (k.params().r(), k.params().s(), k.params().t(), k.d()),
            (&big(3), &big(5), &big(2), &big(6))
        );
        let k = z77_keys();
        assert_eq!((k.params().t(), k.d()), (&big(2), &big(6)));

        let mut rng = RngState::from_seed(0);
        let (_, params) = build_field_mask_params(&[big(1)], &[big(5)], 12, &mut rng).unwrap();
        let k = mask_keygen(params);
        assert_eq!(k.params().r(), &big(1));
        assert_eq!(k.d(), k.params().t());
        assert_eq!(k.params().t() % big(5), big(1));
    }

    #[test]
    fn toy_vectors() {
        assert_eq!(23 * 36 % 77, 58);
        let k = f31_keys();
        let c = mask_encrypt_with_mask(&k.public(), &el(2, 31), &el(5, 31)).unwrap();
        assert_eq!(c.value, el(10, 31));
        assert_eq!(mask_decrypt(&k, &c).unwrap(), el(2, 31));
        let c = mask_encrypt_with_mask(&k.public(), &el(2, 31), &el(1, 31)).unwrap();
        assert_eq!(c.value, el(2, 31));
        assert_eq!(mask_decrypt(&k, &Ciphertext { value: el(1, 31) }).unwrap(), el(1, 31));

        let k = z77_keys();
        let c = mask_encrypt_with_mask(&k.public(), &el(36, 77), &el(23, 77)).unwrap();
        assert_eq!(c.value, el(58, 77));
        assert_eq!(mask_decrypt(&k, &c).unwrap(), el(36, 77));
    }

    #[test]
    fn exhaustive_round_trip_toy() {
        for k in [f31_keys(), z77_keys()] {
            let public = k.public();
            let hs = enumerate_subgroup(k.params().mask_subgroup(), 1 << 12).unwrap();
            let us = enumerate_subgroup(k.params().message_subgroup(), 1 << 12).unwrap();
            for u in &us {
                for h in &hs {
                    let c = mask_encrypt_with_mask(&public, u, h).unwrap();
                    assert_eq!(&mask_decrypt(&k, &c).unwrap(), u);
                }
            }
        }
    }

    #[test]
    fn many_masks_one_plaintext() {
        let mut rng = RngState::from_seed(8);
        let (_, params) = build_ring_with_orders(&[big(3), big(7)], &[big(5), big(11)], 128, &mut rng).unwrap();
        let keys = mask_keygen(params);
        let public = keys.public();
        let u = random_subgroup_element(&public.u, &mut rng).unwrap();
        let mut ciphertexts = std::collections::BTreeSet::new();
        for _ in 0..100 {
            let c = mask_encrypt(&public, &u, &mut rng).unwrap();
            assert_eq!(mask_decrypt(&keys, &c).unwrap(), u);
            ciphertexts.insert(c.value);
        }
        assert!(ciphertexts.len() > 1);
    }

    #[test]
    fn rejects_foreign_elements() {
        let k = f31_keys();
        let mut rng = RngState::from_seed(0);
        assert!(mask_encrypt(&k.public(), &el(2, 77), &mut rng).is_err());
        assert!(mask_decrypt(&k, &Ciphertext { value: el(2, 77) }).is_err());
        assert!(k.public().h.is_public() && k.public().u.is_public());
    }
}
