// SPDX-License-Identifier: Apache-2.0

//! The subgroup-masking cryptosystems.
//!
//! All schemes are header-free: a ciphertext is a single group element.

mod dh;
mod elgamal;
mod mask;
mod rsa;

pub use dh::{dh_alice_message, dh_bob_message, dh_derive, dh_setup, DhPublic, DhSession};
pub use elgamal::{
    elgamal_decrypt, elgamal_encrypt, elgamal_encrypt_with_nonce, elgamal_keygen, ElGamalKeyPair,
    ElGamalPublicKey, ElGamalSecretKey,
};
pub use mask::{mask_decrypt, mask_encrypt, mask_encrypt_with_mask, mask_keygen, MaskKeyPair, MaskPublicKey};
pub use rsa::{
    rsa_mask_decrypt, rsa_mask_encrypt, rsa_mask_encrypt_with_mask, rsa_mask_keygen, RsaMaskKeyPair,
    RsaMaskPublicKey,
};

use crate::{Error, GroupElement, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub value: GroupElement,
}

pub(crate) fn check_modulus(el: &GroupElement, modulus: &num_bigint::BigUint) -> Result<()> {
    if el.modulus() != modulus {
        return Err(Error::InvalidElement(format!(
            "element is modulo {}, expected {modulus}",
            el.modulus()
        )));
    }
    Ok(())
}
