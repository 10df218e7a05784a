// SPDX-License-Identifier: Apache-2.0

//! Mapping payloads to message-subgroup elements.
//!
//! Exponent mode encodes an integer `m` as `u₁^m` for the first generator
//! `u₁` of `U`; the receiver recovers `m` by baby-step giant-step inside
//! `gp(u₁)`, which bounds the usable order. KEM mode transports a random
//! element of `U` whose bytes serve as the session secret.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::groups::random_subgroup_element;
use crate::{Error, GroupElement, Result, RngState, SubgroupSpec};

/// Largest generator order accepted by [`decode_exponent`].
pub const BSGS_MAX_ORDER: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodecMode {
    Exponent,
    Kem,
}

impl fmt::Display for CodecMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecMode::Exponent => "exponent",
            CodecMode::Kem => "kem",
        })
    }
}

impl FromStr for CodecMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponent" => Ok(CodecMode::Exponent),
            "kem" => Ok(CodecMode::Kem),
            other => Err(Error::InvalidArgument(format!("unknown codec mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedMessage {
    pub mode: CodecMode,
    pub payload: Option<BigUint>,
    pub element: GroupElement,
}

fn primary_generator(u: &SubgroupSpec) -> Result<&GroupElement> {
    u.generators()
        .first()
        .ok_or_else(|| Error::InvalidSubgroup("no generators".into()))
}

/// `u₁^m`. When `U` carries its secret orders, `m` is range-checked
/// against the order of `u₁`; a public-only `U` accepts any `m`.
pub fn encode_exponent(m: &BigUint, u: &SubgroupSpec) -> Result<EncodedMessage> {
    let generator = primary_generator(u)?;
    if let Some(order) = u.secret_orders().and_then(|o| o.first()) {
        if m >= order {
            return Err(Error::OutOfRange {
                value: m.clone(),
                bound: order.clone(),
            });
        }
    }
    Ok(EncodedMessage {
        mode: CodecMode::Exponent,
        payload: Some(m.clone()),
        element: generator.pow(m),
    })
}

/// Discrete log of `el` to the base `u₁`, where `s` is the order of `u₁`.
pub fn decode_exponent(el: &GroupElement, u: &SubgroupSpec, s: &BigUint) -> Result<BigUint> {
    decode_exponent_bounded(el, u, s, BSGS_MAX_ORDER)
}

/// [`decode_exponent`] with a caller-chosen order bound.
pub fn decode_exponent_bounded(el: &GroupElement, u: &SubgroupSpec, s: &BigUint, max_order: u64) -> Result<BigUint> {
    let generator = primary_generator(u)?;
    if el.modulus() != generator.modulus() {
        return Err(Error::InvalidElement("element and subgroup moduli differ".into()));
    }
    let order = match s.to_u64() {
        Some(v) if v <= max_order => v,
        _ => return Err(Error::TooLarge { cap: max_order }),
    };
    if order == 0 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    let step = order.sqrt() + u64::from(order.sqrt().pow(2) != order);

    let mut baby: HashMap<BigUint, u64> = HashMap::with_capacity(step as usize);
    let mut acc = GroupElement::one(generator.modulus());
    for j in 0..step {
        baby.entry(acc.residue().clone()).or_insert(j);
        acc = acc.mul(generator)?;
    }
    // acc = u₁^step
    let giant = acc.inverse();
    let mut gamma = el.clone();
    for i in 0..step {
        if let Some(&j) = baby.get(gamma.residue()) {
            let m = i * step + j;
            if m < order {
                return Ok(BigUint::from(m));
            }
        }
        gamma = gamma.mul(&giant)?;
    }
    Err(Error::NotInSubgroup)
}

/// A random element of `U` for key transport; its canonical bytes are the
/// session secret.
pub fn kem_sample(u: &SubgroupSpec, rng: &mut RngState) -> Result<EncodedMessage> {
    Ok(EncodedMessage {
        mode: CodecMode::Kem,
        payload: None,
        element: random_subgroup_element(u, rng)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn el(r: u64, m: u64) -> GroupElement {
        GroupElement::new(big(r), big(m)).unwrap()
    }

    fn u16_in_f31() -> SubgroupSpec {
        SubgroupSpec::with_secret_orders(&big(31), vec![el(16, 31)], vec![big(5)]).unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(16 * 16 % 31, 8);
        let u = u16_in_f31();
        assert_eq!(encode_exponent(&big(2), &u).unwrap().element, el(8, 31));
        assert!(encode_exponent(&big(0), &u).unwrap().element.is_one());
        assert_eq!(
            encode_exponent(&big(5), &u),
            Err(Error::OutOfRange { value: big(5), bound: big(5) })
        );
        // public view cannot range-check
        assert_eq!(encode_exponent(&big(7), &u.public_view()).unwrap().element, el(8, 31));

        assert_eq!(decode_exponent(&el(8, 31), &u, &big(5)).unwrap(), big(2));
        assert_eq!(decode_exponent(&el(1, 31), &u, &big(5)).unwrap(), big(0));
        assert_eq!(decode_exponent(&el(3, 31), &u, &big(5)), Err(Error::NotInSubgroup));
        assert_eq!(
            decode_exponent(&el(8, 31), &u, &(BigUint::from(1u8) << 41u32)),
            Err(Error::TooLarge { cap: BSGS_MAX_ORDER })
        );
    }

    #[test]
    fn decode_inverts_encode_exhaustively() {
        // primitive roots of a few primes, exponents up to 2^12
        for (p, g) in [(31u64, 3u64), (97, 5), (4099, 2), (65537, 3)] {
            let s = big(p - 1);
            let u = SubgroupSpec::with_secret_orders(&big(p), vec![el(g, p)], vec![s.clone()]).unwrap();
            let limit = (p - 1).min(1 << 12);
            for m in 0..limit {
                let encoded = encode_exponent(&big(m), &u).unwrap();
                assert!(encoded.element.pow(&s).is_one());
                assert_eq!(decode_exponent(&encoded.element, &u, &s).unwrap(), big(m));
            }
        }
    }

    #[test]
    fn kem_examples() {
        let u = SubgroupSpec::public(&big(31), vec![el(2, 31)]).unwrap();
        let a = kem_sample(&u, &mut RngState::from_seed(7)).unwrap();
        let b = kem_sample(&u, &mut RngState::from_seed(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mode, CodecMode::Kem);
        assert!(a.payload.is_none());
        assert!(a.element.pow(&big(5)).is_one());
        let trivial = SubgroupSpec::trivial(&big(31));
        assert!(kem_sample(&trivial, &mut RngState::from_seed(1)).unwrap().element.is_one());
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in [CodecMode::Exponent, CodecMode::Kem] {
            assert_eq!(mode.to_string().parse::<CodecMode>().unwrap(), mode);
        }
        assert!("hex".parse::<CodecMode>().is_err());
    }
}
