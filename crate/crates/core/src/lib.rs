// SPDX-License-Identifier: Apache-2.0

//! Probabilistic subgroup-masking public-key encryption.
//!
//! A receiver publishes a platform group (the units of a prime field `F_p`
//! or of an RSA-style ring `Z_n`) together with generators of two subgroups
//! of coprime exponents: a mask subgroup `H` and a message subgroup `U`.
//! A sender hides `u ∈ U` behind a random `h ∈ H`; the receiver, who alone
//! knows the exponents, strips the mask by exponentiation.
//!
//! The crate provides the number theory, parameter construction, four scheme
//! families (basic mask, RSA-combined, ElGamal-style, Diffie-Hellman-style),
//! message codecs and small-scale decision-problem oracles used to exercise
//! the hardness assumptions behind them.
//!
//! ```
//! use num_bigint::BigUint;
//! use submask::codec::{decode_exponent, encode_exponent};
//! use submask::paramgen::build_field_mask_params;
//! use submask::schemes::{mask_decrypt, mask_encrypt, mask_keygen};
//! use submask::RngState;
//!
//! let mut rng = RngState::from_seed(7);
//! let r = vec![BigUint::from(3u8)];
//! let s = vec![BigUint::from(5u8)];
//! let (_, params) = build_field_mask_params(&r, &s, 64, &mut rng)?;
//! let keys = mask_keygen(params);
//!
//! let u = encode_exponent(&BigUint::from(4u8), keys.params().message_subgroup())?;
//! let c = mask_encrypt(&keys.public(), &u.element, &mut rng)?;
//! let plain = mask_decrypt(&keys, &c)?;
//! let m = decode_exponent(&plain, keys.params().message_subgroup(), &s[0])?;
//! assert_eq!(m, BigUint::from(4u8));
//! # Ok::<(), submask::Error>(())
//! ```

pub mod cli;
pub mod codec;
mod error;
pub mod groups;
pub mod numtheory;
pub mod oracles;
pub mod paramgen;
mod rng;
pub mod schemes;

pub use error::{Error, Result};
pub use groups::{Factorization, GroupElement, SubgroupSpec};
pub use num_bigint::BigUint;
pub use rng::RngState;
pub use schemes::Ciphertext;
