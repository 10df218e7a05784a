// SPDX-License-Identifier: Apache-2.0

//! Multiplicative groups `Z_m^*`: elements, factorizations of group orders,
//! element orders, subgroup exponents and bounded enumeration.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::numtheory::{self, is_prime_checked};
use crate::{Error, Result, RngState};

/// Attempts made by [`find_element_of_order`] before giving up.
pub const ORDER_SEARCH_ATTEMPTS: usize = 256;

/// A unit of `Z_m`, tagged with its modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    modulus: BigUint,
    residue: BigUint,
}

impl GroupElement {
    pub fn new(residue: BigUint, modulus: BigUint) -> Result<Self> {
        if modulus < BigUint::from(2u8) {
            return Err(Error::InvalidModulus);
        }
        if residue.is_zero() || residue >= modulus {
            return Err(Error::InvalidElement(format!(
                "residue {residue} outside [1, {}]",
                &modulus - 1u32
            )));
        }
        if !residue.gcd(&modulus).is_one() {
            return Err(Error::InvalidElement(format!(
                "{residue} is not coprime to {modulus}"
            )));
        }
        Ok(GroupElement { modulus, residue })
    }

    /// Reduces `value` modulo `modulus` before validating.
    pub fn reduce(value: &BigUint, modulus: &BigUint) -> Result<Self> {
        if modulus < &BigUint::from(2u8) {
            return Err(Error::InvalidModulus);
        }
        Self::new(value % modulus, modulus.clone())
    }

    pub fn one(modulus: &BigUint) -> Self {
        GroupElement {
            modulus: modulus.clone(),
            residue: BigUint::one(),
        }
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_one(&self) -> bool {
        self.residue.is_one()
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.modulus != other.modulus {
            return Err(Error::InvalidElement(format!(
                "modulus mismatch: {} vs {}",
                self.modulus, other.modulus
            )));
        }
        Ok(GroupElement {
            residue: (&self.residue * &other.residue) % &self.modulus,
            modulus: self.modulus.clone(),
        })
    }

    pub fn pow(&self, exp: &BigUint) -> GroupElement {
        GroupElement {
            residue: self.residue.modpow(exp, &self.modulus),
            modulus: self.modulus.clone(),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let residue = numtheory::mod_inv(&self.residue, &self.modulus)
            .expect("group elements are units");
        GroupElement {
            residue,
            modulus: self.modulus.clone(),
        }
    }

    /// Big-endian bytes of the residue, left-padded to the modulus width.
    pub fn to_bytes_be(&self) -> Vec<u8> {
        let width = self.modulus.bits().div_ceil(8) as usize;
        let raw = self.residue.to_bytes_be();
        let mut out = vec![0u8; width.saturating_sub(raw.len())];
        out.extend_from_slice(&raw);
        out
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

/// Prime factorization as ascending `(prime, multiplicity)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Validates that primes are strictly increasing, pass a 64-round
    /// primality test and carry positive multiplicities.
    pub fn new(factors: Vec<(BigUint, u32)>) -> Result<Self> {
        for window in factors.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(Error::InconsistentFactorization(
                    "primes must be strictly increasing".into(),
                ));
            }
        }
        for (p, m) in &factors {
            if *m == 0 {
                return Err(Error::InconsistentFactorization(format!(
                    "zero multiplicity for {p}"
                )));
            }
            if !is_prime_checked(p) {
                return Err(Error::InconsistentFactorization(format!("{p} is not prime")));
            }
        }
        Ok(Factorization { factors })
    }

    /// The empty factorization of 1.
    pub fn one() -> Self {
        Factorization { factors: Vec::new() }
    }

    pub fn prime(p: BigUint) -> Result<Self> {
        Self::new(vec![(p, 1)])
    }

    /// Factors `n` by trial division below 2^20, allowing one large prime
    /// cofactor. `None` when `n` is zero or does not split that way.
    pub fn trial(n: &BigUint) -> Option<Self> {
        numtheory::trial_factor(n).map(|factors| Factorization { factors })
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, m)| acc * p.pow(*m))
    }

    /// Factorization of the product of `self` and `other`.
    pub fn merge(&self, other: &Factorization) -> Factorization {
        let mut out: Vec<(BigUint, u32)> = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            let take_left = match (self.factors.get(i), other.factors.get(j)) {
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    std::cmp::Ordering::Equal => {
                        out.push((a.0.clone(), a.1 + b.1));
                        i += 1;
                        j += 1;
                        continue;
                    }
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                },
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                out.push(self.factors[i].clone());
                i += 1;
            } else {
                out.push(other.factors[j].clone());
                j += 1;
            }
        }
        Factorization { factors: out }
    }

    /// Prime-power components `p^m`, ascending by prime.
    pub fn prime_powers(&self) -> Vec<BigUint> {
        self.factors.iter().map(|(p, m)| p.pow(*m)).collect()
    }
}

impl fmt::Display for Factorization {
    /// `2^2*3*5`; the empty factorization prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, (p, m)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *m == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Factorization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Factorization::one());
        }
        let bad = || Error::InconsistentFactorization(format!("cannot parse factorization `{s}`"));
        let mut factors = Vec::new();
        for term in s.split('*') {
            let (p, m) = match term.trim().split_once('^') {
                Some((p, m)) => (p, m.parse::<u32>().map_err(|_| bad())?),
                None => (term.trim(), 1),
            };
            factors.push((p.parse::<BigUint>().map_err(|_| bad())?, m));
        }
        Factorization::new(factors)
    }
}

/// A subgroup given by generators, optionally carrying the secret orders
/// of those generators and the resulting exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    modulus: BigUint,
    generators: Vec<GroupElement>,
    secret_orders: Option<Vec<BigUint>>,
    secret_exponent: Option<BigUint>,
}

impl SubgroupSpec {
    /// Public presentation: generators only.
    pub fn public(modulus: &BigUint, generators: Vec<GroupElement>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidSubgroup("no generators".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.modulus() != modulus) {
            return Err(Error::InvalidSubgroup(format!(
                "generator {g} is not modulo {modulus}"
            )));
        }
        Ok(SubgroupSpec {
            modulus: modulus.clone(),
            generators,
            secret_orders: None,
            secret_exponent: None,
        })
    }

    /// Generators with their exact orders. Each order is checked: `g^o = 1`
    /// and `g^(o/ℓ) ≠ 1` for every prime `ℓ | o`.
    pub fn with_secret_orders(
        modulus: &BigUint,
        generators: Vec<GroupElement>,
        orders: Vec<BigUint>,
    ) -> Result<Self> {
        let mut spec = Self::public(modulus, generators)?;
        if orders.len() != spec.generators.len() {
            return Err(Error::InvalidSubgroup(format!(
                "{} generators but {} orders",
                spec.generators.len(),
                orders.len()
            )));
        }
        for (g, o) in spec.generators.iter().zip(&orders) {
            let factorization = Factorization::trial(o).ok_or_else(|| {
                Error::InconsistentFactorization(format!("order {o} does not factor"))
            })?;
            if !has_exact_order(g, o, &factorization) {
                return Err(Error::InvalidSubgroup(format!("{g} does not have order {o}")));
            }
        }
        spec.secret_exponent = Some(numtheory::lcm_all(&orders)?);
        spec.secret_orders = Some(orders);
        Ok(spec)
    }

    /// The trivial subgroup `{1}`.
    pub fn trivial(modulus: &BigUint) -> Self {
        SubgroupSpec {
            modulus: modulus.clone(),
            generators: vec![GroupElement::one(modulus)],
            secret_orders: Some(vec![BigUint::one()]),
            secret_exponent: Some(BigUint::one()),
        }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn secret_orders(&self) -> Option<&[BigUint]> {
        self.secret_orders.as_deref()
    }

    pub fn secret_exponent(&self) -> Option<&BigUint> {
        self.secret_exponent.as_ref()
    }

    /// Copy with every secret field stripped.
    pub fn public_view(&self) -> SubgroupSpec {
        SubgroupSpec {
            modulus: self.modulus.clone(),
            generators: self.generators.clone(),
            secret_orders: None,
            secret_exponent: None,
        }
    }

    pub fn is_public(&self) -> bool {
        self.secret_orders.is_none() && self.secret_exponent.is_none()
    }
}

fn has_exact_order(g: &GroupElement, order: &BigUint, order_factors: &Factorization) -> bool {
    if !g.pow(order).is_one() {
        return false;
    }
    order_factors.primes().all(|l| !g.pow(&(order / l)).is_one())
}

/// Order of `g`, given the factorization of a multiple `N` of it (normally
/// the group order). Divides primes out of `N` while `g` stays annihilated.
pub fn element_order(g: &GroupElement, group_order_factorization: &Factorization) -> Result<BigUint> {
    let mut order = group_order_factorization.value();
    if !g.pow(&order).is_one() {
        return Err(Error::InconsistentFactorization(format!(
            "{g}^{order} != 1 mod {}",
            g.modulus()
        )));
    }
    for (l, m) in group_order_factorization.factors() {
        for _ in 0..*m {
            let candidate = &order / l;
            if g.pow(&candidate).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Exponent `e(H)`: the lcm of the generator orders.
pub fn subgroup_exponent(h: &SubgroupSpec, group_order_factorization: &Factorization) -> Result<BigUint> {
    let orders = h
        .generators()
        .iter()
        .map(|g| element_order(g, group_order_factorization))
        .collect::<Result<Vec<_>>>()?;
    numtheory::lcm_all(&orders)
}

/// Finds an element of exact order `r` in `F_p^*` by raising random
/// elements to `(p-1)/r` and rejecting those whose order is a proper divisor.
pub fn find_element_of_order(
    r: &BigUint,
    p: &BigUint,
    factorization_of_r: &Factorization,
    rng: &mut RngState,
) -> Result<GroupElement> {
    if &factorization_of_r.value() != r {
        return Err(Error::InconsistentFactorization(format!(
            "factorization does not multiply to {r}"
        )));
    }
    if p < &BigUint::from(2u8) {
        return Err(Error::InvalidModulus);
    }
    let p_minus_1 = p - 1u32;
    if r.is_zero() || !(&p_minus_1 % r).is_zero() {
        return Err(Error::OrderUnavailable { order: r.clone() });
    }
    if r.is_one() {
        return Ok(GroupElement::one(p));
    }
    let cofactor = &p_minus_1 / r;
    let lo = BigUint::from(2u8);
    // [2, p-2] when nonempty; F_3 only has the candidate 2
    let hi = if p > &BigUint::from(3u8) { p_minus_1.clone() } else { p.clone() };
    for _ in 0..ORDER_SEARCH_ATTEMPTS {
        let w = rng.gen_biguint_range(&lo, &hi);
        let g = GroupElement::new(w.modpow(&cofactor, p), p.clone())?;
        if has_exact_order(&g, r, factorization_of_r) {
            return Ok(g);
        }
    }
    Err(Error::SearchFailure(format!(
        "no element of order {r} mod {p} after {ORDER_SEARCH_ATTEMPTS} attempts"
    )))
}

/// All elements of `H`, by closing the generator set under multiplication.
pub fn enumerate_subgroup(h: &SubgroupSpec, cap: u64) -> Result<BTreeSet<GroupElement>> {
    let one = GroupElement::one(h.modulus());
    let mut seen = BTreeSet::new();
    seen.insert(one.clone());
    let mut queue = VecDeque::from([one]);
    while let Some(x) = queue.pop_front() {
        for g in h.generators() {
            let y = x.mul(g)?;
            if !seen.contains(&y) {
                if seen.len() as u64 >= cap {
                    return Err(Error::TooLarge { cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// A random element `∏ g_i^(e_i)` with each `e_i` uniform in
/// `[0, modulus·2^64)`. The sampler never learns `|H|`; oversized exponents
/// put the result within 2^-64 of uniform on each cyclic factor.
pub fn random_subgroup_element(h: &SubgroupSpec, rng: &mut RngState) -> Result<GroupElement> {
    if h.generators().is_empty() {
        return Err(Error::InvalidSubgroup("no generators".into()));
    }
    let bound = h.modulus() << 64u32;
    let mut acc = GroupElement::one(h.modulus());
    for g in h.generators() {
        let e = rng.gen_biguint_below(&bound);
        acc = acc.mul(&g.pow(&e))?;
    }
    Ok(acc)
}
