// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigUint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus must be at least 2")]
    InvalidModulus,
    #[error("gcd(0, 0) is undefined")]
    UndefinedGcd,
    #[error("element is not invertible (gcd = {gcd})")]
    NotInvertible { gcd: BigUint },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("CRT moduli are not coprime")]
    CrtModuli,
    #[error("search failed: {0}")]
    SearchFailure(String),
    #[error("factorization is inconsistent: {0}")]
    InconsistentFactorization(String),
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("no element of order {order} exists in this group")]
    OrderUnavailable { order: BigUint },
    #[error("enumeration exceeds the cap of {cap} elements")]
    TooLarge { cap: u64 },
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("parameter conflict: {0}")]
    ParameterConflict(String),
    #[error("public exponent shares a factor with the message subgroup exponent")]
    BadPublicExponent,
    #[error("message {value} out of range [0, {bound})")]
    OutOfRange { value: BigUint, bound: BigUint },
    #[error("element is not in the subgroup")]
    NotInSubgroup,
}
