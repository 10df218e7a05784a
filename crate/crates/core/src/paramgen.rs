// SPDX-License-Identifier: Apache-2.0

//! Construction of prime fields and RSA-style rings whose unit groups
//! contain subgroups of prescribed orders and exponents.
//!
//! Every prime produced here comes with the full factorization of `p - 1`,
//! which the key holder needs to certify element orders. For small
//! parameters the cofactor `x` in `p = 1 + 2·R·x` is sampled uniformly and
//! factored by trial division. Once `x` has more than 40 free bits it is
//! assembled as `ℓ·c` from a fresh random prime `ℓ` and a small uniform `c`,
//! since a uniform `x` of that size is almost never smooth.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::groups::{find_element_of_order, Factorization, GroupElement, SubgroupSpec};
use crate::numtheory::{self, gen_prime_with_factor, is_prime_checked};
use crate::{Error, Result, RngState};

/// Cofactor bit budget below which `x` is sampled uniformly and trial-factored.
const UNIFORM_COFACTOR_BITS: u64 = 40;
/// Bits left for the small factor `c` when the cofactor is assembled as `ℓ·c`.
const SMALL_COFACTOR_BITS: u64 = 20;
/// Outer retries of the cofactor search.
const COFACTOR_ATTEMPTS: usize = 64;

/// A prime field `F_p` with the secret factorization of `p - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldParams {
    p: BigUint,
    pm1: Factorization,
}

impl FieldParams {
    pub fn new(p: BigUint, pm1: Factorization) -> Result<Self> {
        if p < BigUint::from(3u8) || !is_prime_checked(&p) {
            return Err(Error::InconsistentFactorization(format!("{p} is not an odd prime")));
        }
        if pm1.value() != &p - 1u32 {
            return Err(Error::InconsistentFactorization(format!(
                "factorization does not reconstruct {p} - 1"
            )));
        }
        Ok(FieldParams { p, pm1 })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn pm1_factorization(&self) -> &Factorization {
        &self.pm1
    }
}

/// A ring `Z_n`, `n = p·q`, with secret primes and factorizations of
/// `p - 1` and `q - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingParams {
    n: BigUint,
    p: FieldParams,
    q: FieldParams,
    phi: BigUint,
}

impl RingParams {
    pub fn new(p: FieldParams, q: FieldParams) -> Result<Self> {
        if p.p == q.p {
            return Err(Error::ParameterConflict("ring primes must differ".into()));
        }
        Ok(RingParams {
            n: &p.p * &q.p,
            phi: (&p.p - 1u32) * (&q.p - 1u32),
            p,
            q,
        })
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn p(&self) -> &BigUint {
        &self.p.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q.p
    }

    pub fn phi(&self) -> &BigUint {
        &self.phi
    }

    pub fn pm1_factorization(&self) -> &Factorization {
        &self.p.pm1
    }

    pub fn qm1_factorization(&self) -> &Factorization {
        &self.q.pm1
    }
}

/// The group a scheme runs in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Platform {
    Field(FieldParams),
    Ring(RingParams),
}

impl Platform {
    pub fn modulus(&self) -> &BigUint {
        match self {
            Platform::Field(f) => f.p(),
            Platform::Ring(r) => r.n(),
        }
    }

    /// Factorization of `|Z_m^*|`.
    pub fn group_order_factorization(&self) -> Factorization {
        match self {
            Platform::Field(f) => f.pm1.clone(),
            Platform::Ring(r) => r.p.pm1.merge(&r.q.pm1),
        }
    }
}

/// Platform plus mask subgroup `H` (exponent `r`) and message subgroup `U`
/// (exponent `s`), with `t = r^-1 mod s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskParams {
    platform: Platform,
    h: SubgroupSpec,
    u: SubgroupSpec,
    r: BigUint,
    s: BigUint,
    t: BigUint,
}

impl MaskParams {
    /// Assembles and checks the invariants: `gcd(r, s) = 1`, `t·r ≡ 1 (mod s)`,
    /// every generator annihilated by its side's exponent, and both subgroups
    /// over the platform modulus with certified secret orders.
    pub fn new(platform: Platform, h: SubgroupSpec, u: SubgroupSpec) -> Result<Self> {
        let modulus = platform.modulus().clone();
        for (name, spec) in [("H", &h), ("U", &u)] {
            if spec.modulus() != &modulus {
                return Err(Error::InvalidSubgroup(format!("{name} is not over the platform modulus")));
            }
            if spec.secret_exponent().is_none() {
                return Err(Error::InvalidSubgroup(format!("{name} lacks secret orders")));
            }
        }
        let r = h.secret_exponent().expect("checked above").clone();
        let s = u.secret_exponent().expect("checked above").clone();
        if !r.gcd(&s).is_one() {
            return Err(Error::ParameterConflict(format!(
                "mask exponent {r} and message exponent {s} are not coprime"
            )));
        }
        let t = numtheory::inv_mod_exponent(&r, &s)?;
        for (exp, spec) in [(&r, &h), (&s, &u)] {
            if spec.generators().iter().any(|g| !g.pow(exp).is_one()) {
                return Err(Error::InvalidSubgroup("generator not annihilated by exponent".into()));
            }
        }
        Ok(MaskParams { platform, h, u, r, s, t })
    }

    pub fn platform(&self) -> &Platform {
        &self.platform
    }

    pub fn modulus(&self) -> &BigUint {
        self.platform.modulus()
    }

    pub fn mask_subgroup(&self) -> &SubgroupSpec {
        &self.h
    }

    pub fn message_subgroup(&self) -> &SubgroupSpec {
        &self.u
    }

    pub fn r(&self) -> &BigUint {
        &self.r
    }

    pub fn s(&self) -> &BigUint {
        &self.s
    }

    pub fn t(&self) -> &BigUint {
        &self.t
    }
}

fn factor_orders(orders: &[BigUint]) -> Result<Vec<Factorization>> {
    if orders.is_empty() {
        return Err(Error::InvalidArgument("order list is empty".into()));
    }
    orders
        .iter()
        .map(|o| {
            if o.bits() == 0 {
                return Err(Error::InvalidArgument("orders must be >= 1".into()));
            }
            Factorization::trial(o).ok_or_else(|| {
                Error::ParameterConflict(format!("order {o} does not factor by trial division"))
            })
        })
        .collect()
}

fn factor_value(v: &BigUint) -> Result<Factorization> {
    factor_orders(std::slice::from_ref(v)).map(|mut f| f.remove(0))
}

/// Finds a `bits`-bit prime `p ≡ 1 (mod 2r)` with fully known `p - 1`.
pub(crate) fn search_prime(
    r: &BigUint,
    r_factorization: &Factorization,
    bits: u64,
    rng: &mut RngState,
) -> Result<FieldParams> {
    let two = Factorization::prime(BigUint::from(2u8))?;
    let base = two.merge(r_factorization);
    let free_bits = bits.saturating_sub((r << 1u32).bits());
    let mut last_err = None;
    for _ in 0..COFACTOR_ATTEMPTS {
        let (ell, ell_factorization) = if free_bits > UNIFORM_COFACTOR_BITS {
            let (ell, _) = gen_prime_with_factor(&BigUint::one(), free_bits - SMALL_COFACTOR_BITS, rng)?;
            let f = Factorization::prime(ell.clone())?;
            (ell, f)
        } else {
            (BigUint::one(), Factorization::one())
        };
        let (p, c) = match gen_prime_with_factor(&(r * &ell), bits, rng) {
            Ok(found) => found,
            Err(e @ Error::SearchFailure(_)) if ell.is_one() => return Err(e),
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let Some(c_factorization) = Factorization::trial(&c) else {
            continue;
        };
        let pm1 = base.merge(&ell_factorization).merge(&c_factorization);
        return FieldParams::new(p, pm1);
    }
    Err(last_err.unwrap_or_else(|| {
        Error::SearchFailure(format!("no {bits}-bit prime with factorable p - 1"))
    }))
}

/// Builds `F_p`, `p = 1 + 2·(∏ r_i)·x`, with an element of exact order
/// `r_i` for each requested order.
pub fn build_field_with_orders(
    orders: &[BigUint],
    bits: u64,
    rng: &mut RngState,
) -> Result<(FieldParams, Vec<GroupElement>)> {
    let factorizations = factor_orders(orders)?;
    let product = orders.iter().product::<BigUint>();
    let product_factorization = factorizations
        .iter()
        .fold(Factorization::one(), |acc, f| acc.merge(f));
    let field = search_prime(&product, &product_factorization, bits, rng)?;
    let elements = orders
        .iter()
        .zip(&factorizations)
        .map(|(o, f)| find_element_of_order(o, field.p(), f, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok((field, elements))
}

/// Prime-power split of `e`, ascending by prime; `[1]` for `e = 1`.
fn prime_power_orders(e: &BigUint) -> Result<Vec<BigUint>> {
    let powers = factor_value(e)?.prime_powers();
    Ok(if powers.is_empty() { vec![BigUint::one()] } else { powers })
}

/// Builds `F_p` and `H = gp(g_1, ..., g_t)` of exponent `e`, using the
/// prime-power components of `e` as the generator orders.
pub fn build_subgroup_of_exponent(
    e: &BigUint,
    bits: u64,
    rng: &mut RngState,
) -> Result<(FieldParams, SubgroupSpec)> {
    let orders = prime_power_orders(e)?;
    let (field, elements) = build_field_with_orders(&orders, bits, rng)?;
    let h = SubgroupSpec::with_secret_orders(field.p(), elements, orders)?;
    Ok((field, h))
}

fn mask_exponents(r_list: &[BigUint], s_list: &[BigUint]) -> Result<(BigUint, BigUint)> {
    factor_orders(r_list)?;
    factor_orders(s_list)?;
    let r = numtheory::lcm_all(r_list)?;
    let s = numtheory::lcm_all(s_list)?;
    if !r.gcd(&s).is_one() {
        return Err(Error::ParameterConflict(format!(
            "lcm(r) = {r} and lcm(s) = {s} are not coprime"
        )));
    }
    Ok((r, s))
}

fn elements_of_orders(orders: &[BigUint], p: &BigUint, rng: &mut RngState) -> Result<Vec<GroupElement>> {
    orders
        .iter()
        .map(|o| find_element_of_order(o, p, &factor_value(o)?, rng))
        .collect()
}

/// Field version: one prime `p ≡ 1 (mod 2·r·s)` carrying both subgroups.
pub fn build_field_mask_params(
    r_list: &[BigUint],
    s_list: &[BigUint],
    bits: u64,
    rng: &mut RngState,
) -> Result<(FieldParams, MaskParams)> {
    let (r, s) = mask_exponents(r_list, s_list)?;
    let rs = &r * &s;
    let field = search_prime(&rs, &factor_value(&rs)?, bits, rng)?;
    let p = field.p().clone();
    let h = SubgroupSpec::with_secret_orders(&p, elements_of_orders(r_list, &p, rng)?, r_list.to_vec())?;
    let u = SubgroupSpec::with_secret_orders(&p, elements_of_orders(s_list, &p, rng)?, s_list.to_vec())?;
    let params = MaskParams::new(Platform::Field(field.clone()), h, u)?;
    Ok((field, params))
}

/// Ring version: `p` carries the mask orders and `q` the message orders.
/// Mask generators are lifted as `(g mod p, 1 mod q)` and message
/// generators as `(1 mod p, g mod q)`, so their orders are preserved.
/// `bits` is the size of `n`; `p` gets `⌊bits/2⌋` bits.
pub fn build_ring_with_orders(
    r_list: &[BigUint],
    s_list: &[BigUint],
    bits: u64,
    rng: &mut RngState,
) -> Result<(RingParams, MaskParams)> {
    let (r, s) = mask_exponents(r_list, s_list)?;
    let p_bits = bits / 2;
    let q_bits = bits - p_bits;
    let p_field = search_prime(&r, &factor_value(&r)?, p_bits, rng)?;
    let mut q_field = search_prime(&s, &factor_value(&s)?, q_bits, rng)?;
    let mut retries = 0;
    while q_field.p() == p_field.p() {
        retries += 1;
        if retries > COFACTOR_ATTEMPTS {
            return Err(Error::SearchFailure("could not find distinct ring primes".into()));
        }
        q_field = search_prime(&s, &factor_value(&s)?, q_bits, rng)?;
    }
    let (p, q) = (p_field.p().clone(), q_field.p().clone());
    let ring = RingParams::new(p_field, q_field)?;
    let n = ring.n().clone();
    let one = BigUint::one();

    let lift = |elements: Vec<GroupElement>, on_p: bool| -> Result<Vec<GroupElement>> {
        elements
            .into_iter()
            .map(|g| {
                let value = if on_p {
                    numtheory::crt_pair(g.residue(), &p, &one, &q)?
                } else {
                    numtheory::crt_pair(&one, &p, g.residue(), &q)?
                };
                GroupElement::new(value, n.clone())
            })
            .collect()
    };
    let h_gens = lift(elements_of_orders(r_list, &p, rng)?, true)?;
    let u_gens = lift(elements_of_orders(s_list, &q, rng)?, false)?;
    let h = SubgroupSpec::with_secret_orders(&n, h_gens, r_list.to_vec())?;
    let u = SubgroupSpec::with_secret_orders(&n, u_gens, s_list.to_vec())?;
    let params = MaskParams::new(Platform::Ring(ring.clone()), h, u)?;
    Ok((ring, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{element_order, enumerate_subgroup};

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn bigs(v: &[u64]) -> Vec<BigUint> {
        v.iter().copied().map(big).collect()
    }

    fn brute_order(r: u64, m: u64) -> u64 {
        let mut x = r % m;
        let mut k = 1;
        while x != 1 {
            x = x * r % m;
            k += 1;
        }
        k
    }

    fn residue(g: &GroupElement) -> u64 {
        g.residue().try_into().unwrap()
    }

    #[test]
    fn field_with_orders_examples() {
        let mut rng = RngState::from_seed(1);
        let (field, els) = build_field_with_orders(&bigs(&[3, 5]), 5, &mut rng).unwrap();
        assert_eq!(field.p(), &big(31));
        assert_eq!(field.pm1_factorization().to_string(), "2*3*5");
        assert_eq!(brute_order(residue(&els[0]), 31), 3);
        assert_eq!(brute_order(residue(&els[1]), 31), 5);

        let (_, els) = build_field_with_orders(&bigs(&[1]), 8, &mut rng).unwrap();
        assert!(els[0].is_one());

        // 1 + 48x with 7 bits forces x = 2
        let (field, els) = build_field_with_orders(&bigs(&[4, 6]), 7, &mut rng).unwrap();
        assert_eq!(field.p(), &big(97));
        assert_eq!(brute_order(residue(&els[0]), 97), 4);
        assert_eq!(brute_order(residue(&els[1]), 97), 6);
    }

    #[test]
    fn subgroup_of_exponent_examples() {
        let mut rng = RngState::from_seed(2);
        let (field, h) = build_subgroup_of_exponent(&big(15), 5, &mut rng).unwrap();
        assert_eq!(field.p(), &big(31));
        assert_eq!(h.secret_orders().unwrap(), &bigs(&[3, 5])[..]);
        assert_eq!(h.secret_exponent(), Some(&big(15)));

        let (_, h) = build_subgroup_of_exponent(&big(1), 16, &mut rng).unwrap();
        assert_eq!(enumerate_subgroup(&h, 10).unwrap().len(), 1);

        let (field, h) = build_subgroup_of_exponent(&big(12), 24, &mut rng).unwrap();
        assert_eq!(h.secret_orders().unwrap(), &bigs(&[4, 3])[..]);
        let phi = field.pm1_factorization();
        assert_eq!(element_order(&h.generators()[0], phi).unwrap(), big(4));
        assert_eq!(element_order(&h.generators()[1], phi).unwrap(), big(3));
    }

    #[test]
    fn ring_toy_example() {
        let mut rng = RngState::from_seed(3);
        let (ring, params) = build_ring_with_orders(&bigs(&[3]), &bigs(&[5]), 7, &mut rng).unwrap();
        assert_eq!((ring.p(), ring.q(), ring.n()), (&big(7), &big(11), &big(77)));
        assert_eq!(ring.phi(), &big(60));
        assert_eq!(params.t(), &big(2));
        let h = residue(&params.mask_subgroup().generators()[0]);
        let u = residue(&params.message_subgroup().generators()[0]);
        assert_eq!(brute_order(h, 77), 3);
        assert_eq!(brute_order(u, 77), 5);
        assert_eq!(h % 11, 1);
        assert_eq!(u % 7, 1);
        // the documented toy vector is one of the possible draws
        assert!([23u64, 67].contains(&h));
        assert!([15u64, 36, 64, 71].contains(&u));
    }

    #[test]
    fn trivial_and_conflicting_lists() {
        let mut rng = RngState::from_seed(4);
        let (_, params) = build_ring_with_orders(&bigs(&[1]), &bigs(&[1]), 16, &mut rng).unwrap();
        assert!(params.mask_subgroup().generators()[0].is_one());
        assert!(params.message_subgroup().generators()[0].is_one());
        assert!(matches!(
            build_ring_with_orders(&bigs(&[2]), &bigs(&[2]), 16, &mut rng),
            Err(Error::ParameterConflict(_))
        ));

        let (field, params) = build_field_mask_params(&bigs(&[3]), &bigs(&[5]), 5, &mut rng).unwrap();
        assert_eq!(field.p(), &big(31));
        assert_eq!((params.r(), params.s(), params.t()), (&big(3), &big(5), &big(2)));
        assert!([5u64, 25].contains(&residue(&params.mask_subgroup().generators()[0])));
        assert!([2u64, 4, 8, 16].contains(&residue(&params.message_subgroup().generators()[0])));

        let (_, params) = build_field_mask_params(&bigs(&[1]), &bigs(&[1]), 12, &mut rng).unwrap();
        assert!(params.mask_subgroup().generators()[0].is_one());
        assert!(matches!(
            build_field_mask_params(&bigs(&[3]), &bigs(&[3]), 12, &mut rng),
            Err(Error::ParameterConflict(_))
        ));
        assert!(matches!(
            build_field_mask_params(&bigs(&[3]), &[], 12, &mut rng),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn large_field_has_certified_factorization() {
        let mut rng = RngState::from_seed(5);
        let (field, params) = build_field_mask_params(&bigs(&[3, 7]), &bigs(&[5, 11]), 256, &mut rng).unwrap();
        assert_eq!(field.p().bits(), 256);
        assert_eq!(field.pm1_factorization().value(), field.p() - 1u32);
        assert!((field.p() % big(2 * 21 * 55)).is_one());
        let phi = params.platform().group_order_factorization();
        for (g, o) in params
            .mask_subgroup()
            .generators()
            .iter()
            .zip(params.mask_subgroup().secret_orders().unwrap())
        {
            assert_eq!(&element_order(g, &phi).unwrap(), o);
        }
    }

    #[test]
    fn large_ring_shape() {
        let mut rng = RngState::from_seed(6);
        let (ring, params) = build_ring_with_orders(&bigs(&[9, 4]), &bigs(&[5, 7]), 256, &mut rng).unwrap();
        assert_eq!(ring.p().bits(), 128);
        assert_eq!(ring.q().bits(), 128);
        assert_eq!(ring.n(), &(ring.p() * ring.q()));
        assert_eq!(ring.pm1_factorization().value(), ring.p() - 1u32);
        assert_eq!(ring.qm1_factorization().value(), ring.q() - 1u32);
        assert_eq!(params.r(), &big(36));
        assert_eq!(params.s(), &big(35));
        for h in params.mask_subgroup().generators() {
            assert!((h.residue() % ring.q()).is_one());
        }
        for u in params.message_subgroup().generators() {
            assert!((u.residue() % ring.p()).is_one());
        }
    }

    #[test]
    fn full_order_product_is_unique_decomposition() {
        // r·s = p - 1 needs p = 1 + r·s, so the parameters are assembled by hand
        let p = big(31);
        let field = FieldParams::new(p.clone(), "2*3*5".parse().unwrap()).unwrap();
        let order10 = (1..31).find(|&g| brute_order(g, 31) == 10).unwrap();
        let h = SubgroupSpec::with_secret_orders(&p, vec![GroupElement::new(big(5), p.clone()).unwrap()], bigs(&[3])).unwrap();
        let u = SubgroupSpec::with_secret_orders(&p, vec![GroupElement::new(big(order10), p.clone()).unwrap()], bigs(&[10])).unwrap();
        let params = MaskParams::new(Platform::Field(field), h, u).unwrap();
        assert_eq!(params.r() * params.s(), big(30));
        let hs = enumerate_subgroup(params.mask_subgroup(), 64).unwrap();
        let us = enumerate_subgroup(params.message_subgroup(), 64).unwrap();
        let mut products = std::collections::BTreeSet::new();
        for a in &hs {
            for b in &us {
                assert!(products.insert(a.mul(b).unwrap()));
            }
        }
        assert_eq!(products.len(), 30);
    }

    #[test]
    fn mask_params_reject_bad_inverses() {
        let p = big(31);
        let field = FieldParams::new(p.clone(), "2*3*5".parse().unwrap()).unwrap();
        let h = SubgroupSpec::with_secret_orders(&p, vec![GroupElement::new(big(30), p.clone()).unwrap()], bigs(&[2])).unwrap();
        let u = SubgroupSpec::with_secret_orders(&p, vec![GroupElement::new(big(5), p.clone()).unwrap()], bigs(&[3])).unwrap();
        assert!(MaskParams::new(Platform::Field(field.clone()), h.public_view(), u.clone()).is_err());
        let u6 = SubgroupSpec::with_secret_orders(&p, vec![GroupElement::new(big(6), p.clone()).unwrap()], bigs(&[6])).unwrap();
        assert!(matches!(MaskParams::new(Platform::Field(field), h, u6), Err(Error::ParameterConflict(_))));
        assert!(FieldParams::new(big(31), "2*3".parse().unwrap()).is_err());
        assert!(FieldParams::new(big(33), "2^5".parse().unwrap()).is_err());
    }
}
