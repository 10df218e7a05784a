// SPDX-License-Identifier: Apache-2.0

//! Key and ciphertext files.
//!
//! Key files are line-oriented `name = value` records. Two header records
//! (`version`, `scheme`) are followed by a `[public]` section and, in secret
//! files only, a `[secret]` section. Integers are decimal; lists are
//! comma-separated; factorizations are written `2^2*3*5`. Unknown or
//! duplicate fields are rejected.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::codec::CodecMode;
use crate::paramgen::{FieldParams, MaskParams, Platform, RingParams};
use crate::schemes::{
    mask_keygen, rsa_mask_keygen, DhPublic, DhSession, ElGamalKeyPair, ElGamalPublicKey, ElGamalSecretKey,
    MaskKeyPair, MaskPublicKey, RsaMaskKeyPair, RsaMaskPublicKey,
};
use crate::{Ciphertext, Factorization, GroupElement, SubgroupSpec};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct FormatError(pub String);

type Result<T> = std::result::Result<T, FormatError>;

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(FormatError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scheme {
    FieldMask,
    RingMask,
    RsaMask,
    #[value(name = "elgamal-subgroup")]
    ElGamalSubgroup,
    DhSubgroup,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::FieldMask => "field-mask",
            Scheme::RingMask => "ring-mask",
            Scheme::RsaMask => "rsa-mask",
            Scheme::ElGamalSubgroup => "elgamal-subgroup",
            Scheme::DhSubgroup => "dh-subgroup",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            Scheme::FieldMask,
            Scheme::RingMask,
            Scheme::RsaMask,
            Scheme::ElGamalSubgroup,
            Scheme::DhSubgroup,
        ]
        .into_iter()
        .find(|sc| sc.name() == s)
        .map_or_else(|| bad(format!("unknown scheme `{s}`")), Ok)
    }

    fn public_fields(self) -> &'static [&'static str] {
        match self {
            Scheme::FieldMask | Scheme::RingMask => &["modulus", "h", "u"],
            Scheme::RsaMask => &["modulus", "h", "u", "e"],
            Scheme::ElGamalSubgroup => &["p", "g", "y", "gb"],
            Scheme::DhSubgroup => &["p", "g", "r1", "s1", "h", "u"],
        }
    }

    fn secret_fields(self) -> &'static [&'static str] {
        match self {
            Scheme::FieldMask => &["p", "pm1-factors", "h-orders", "u-orders", "r", "s", "t", "d"],
            Scheme::RingMask => &[
                "p", "q", "phi", "pm1-factors", "qm1-factors", "h-orders", "u-orders", "r", "s", "t", "d",
            ],
            Scheme::RsaMask => &[
                "p", "q", "phi", "pm1-factors", "qm1-factors", "h-orders", "u-orders", "t-h", "r-u", "d1", "d",
            ],
            Scheme::ElGamalSubgroup => &["r", "s", "a", "k", "t", "pm1-factors"],
            Scheme::DhSubgroup => &["r", "s", "pm1-factors", "h-orders", "u-orders"],
        }
    }
}

/// Ordered `name = value` records of one section.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Section(Vec<(String, String)>);

impl Section {
    fn put(&mut self, name: &str, value: impl ToString) {
        self.0.push((name.to_string(), value.to_string()));
    }

    fn get(&self, name: &str) -> Result<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
            .map_or_else(|| bad(format!("missing field `{name}`")), Ok)
    }

    fn int(&self, name: &str) -> Result<BigUint> {
        parse_int(self.get(name)?, name)
    }

    fn ints(&self, name: &str) -> Result<Vec<BigUint>> {
        self.get(name)?.split(',').map(|v| parse_int(v, name)).collect()
    }

    fn factorization(&self, name: &str) -> Result<Factorization> {
        self.get(name)?
            .parse()
            .map_err(|e| FormatError(format!("field `{name}`: {e}")))
    }

    fn element(&self, name: &str, modulus: &BigUint) -> Result<GroupElement> {
        element(self.int(name)?, modulus, name)
    }

    fn elements(&self, name: &str, modulus: &BigUint) -> Result<Vec<GroupElement>> {
        self.ints(name)?.into_iter().map(|v| element(v, modulus, name)).collect()
    }

    fn check_fields(&self, allowed: &[&str], section: &str) -> Result<()> {
        for (idx, (k, _)) in self.0.iter().enumerate() {
            if !allowed.contains(&k.as_str()) {
                return bad(format!("unknown field `{k}` in [{section}]"));
            }
            if self.0[..idx].iter().any(|(prev, _)| prev == k) {
                return bad(format!("duplicate field `{k}` in [{section}]"));
            }
        }
        for name in allowed {
            self.get(name)?;
        }
        Ok(())
    }
}

fn parse_int(v: &str, name: &str) -> Result<BigUint> {
    let v = v.trim();
    if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
        return bad(format!("field `{name}`: `{v}` is not a decimal integer"));
    }
    Ok(v.parse().expect("validated digits"))
}

fn element(v: BigUint, modulus: &BigUint, name: &str) -> Result<GroupElement> {
    GroupElement::new(v, modulus.clone()).map_err(|e| FormatError(format!("field `{name}`: {e}")))
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn core<T>(r: crate::Result<T>, what: &str) -> Result<T> {
    r.map_err(|e| FormatError(format!("{what}: {e}")))
}

/// A parsed key file before it is interpreted per scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyDocument {
    pub scheme: Scheme,
    pub public: Section,
    pub secret: Option<Section>,
}

impl KeyDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut header = Section::default();
        let mut public: Option<Section> = None;
        let mut secret: Option<Section> = None;
        let mut current = 0u8; // 0 header, 1 public, 2 secret
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[public]" if public.is_none() && secret.is_none() => {
                    public = Some(Section::default());
                    current = 1;
                    continue;
                }
                "[secret]" if public.is_some() && secret.is_none() => {
                    secret = Some(Section::default());
                    current = 2;
                    continue;
                }
                _ if line.starts_with('[') => return bad(format!("line {}: unexpected section `{line}`", lineno + 1)),
                _ => {}
            }
            let Some((k, v)) = line.split_once('=') else {
                return bad(format!("line {}: expected `name = value`", lineno + 1));
            };
            let target = match current {
                0 => &mut header,
                1 => public.as_mut().expect("in public section"),
                _ => secret.as_mut().expect("in secret section"),
            };
            target.put(k.trim(), v.trim());
        }
        header.check_fields(&["version", "scheme"], "header")?;
        if header.get("version")? != FORMAT_VERSION {
            return bad(format!("unsupported version `{}`", header.get("version")?));
        }
        let scheme = Scheme::parse(header.get("scheme")?)?;
        let Some(public) = public else {
            return bad("missing [public] section");
        };
        public.check_fields(scheme.public_fields(), "public")?;
        if let Some(secret) = &secret {
            secret.check_fields(scheme.secret_fields(), "secret")?;
        }
        Ok(KeyDocument { scheme, public, secret })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "version = {FORMAT_VERSION}");
        let _ = writeln!(out, "scheme = {}", self.scheme.name());
        let mut section = |name: &str, s: &Section| {
            let _ = writeln!(out, "\n[{name}]");
            for (k, v) in &s.0 {
                let _ = writeln!(out, "{k} = {v}");
            }
        };
        section("public", &self.public);
        if let Some(secret) = &self.secret {
            section("secret", secret);
        }
        out
    }

    /// Copy without the secret section.
    pub fn public_only(&self) -> KeyDocument {
        KeyDocument {
            scheme: self.scheme,
            public: self.public.clone(),
            secret: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PublicKey {
    Mask(Scheme, MaskPublicKey),
    Rsa(RsaMaskPublicKey),
    ElGamal(ElGamalPublicKey),
    Dh(DhPublic),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SecretKey {
    Mask(Scheme, MaskKeyPair),
    Rsa(RsaMaskKeyPair),
    ElGamal(ElGamalKeyPair),
    Dh(DhSession),
}

impl SecretKey {
    pub fn scheme(&self) -> Scheme {
        match self {
            SecretKey::Mask(s, _) => *s,
            SecretKey::Rsa(_) => Scheme::RsaMask,
            SecretKey::ElGamal(_) => Scheme::ElGamalSubgroup,
            SecretKey::Dh(_) => Scheme::DhSubgroup,
        }
    }

    pub fn to_document(&self) -> KeyDocument {
        let mut public = Section::default();
        let mut secret = Section::default();
        match self {
            SecretKey::Mask(scheme, keys) => {
                mask_public_section(&mut public, keys.params());
                platform_secret_section(&mut secret, keys.params());
                secret.put("r", keys.params().r());
                secret.put("s", keys.params().s());
                secret.put("t", keys.params().t());
                secret.put("d", keys.d());
                return KeyDocument {
                    scheme: *scheme,
                    public,
                    secret: Some(secret),
                };
            }
            SecretKey::Rsa(keys) => {
                mask_public_section(&mut public, keys.params());
                public.put("e", keys.e());
                platform_secret_section(&mut secret, keys.params());
                secret.put("t-h", keys.params().r());
                secret.put("r-u", keys.params().s());
                secret.put("d1", keys.d1());
                secret.put("d", keys.d());
            }
            SecretKey::ElGamal(keys) => {
                let (p, s) = (&keys.public, &keys.secret);
                public.put("p", &p.p);
                public.put("g", &p.g);
                public.put("y", &p.y);
                public.put("gb", &p.gb);
                secret.put("r", &s.r);
                secret.put("s", &s.s);
                secret.put("a", &s.a);
                secret.put("k", &s.k);
                secret.put("t", &s.t);
                secret.put("pm1-factors", &s.pm1);
            }
            SecretKey::Dh(session) => {
                public.put("p", &session.p);
                public.put("g", &session.g);
                public.put("r1", &session.r1);
                public.put("s1", &session.s1);
                public.put("h", join(session.h.generators()));
                public.put("u", join(session.u.generators()));
                secret.put("r", &session.r);
                secret.put("s", &session.s);
                secret.put("pm1-factors", &session.pm1);
                secret.put("h-orders", join(session.h.secret_orders().unwrap_or_default()));
                secret.put("u-orders", join(session.u.secret_orders().unwrap_or_default()));
            }
        }
        KeyDocument {
            scheme: self.scheme(),
            public,
            secret: Some(secret),
        }
    }
}

fn mask_public_section(public: &mut Section, params: &MaskParams) {
    public.put("modulus", params.modulus());
    public.put("h", join(params.mask_subgroup().generators()));
    public.put("u", join(params.message_subgroup().generators()));
}

fn platform_secret_section(secret: &mut Section, params: &MaskParams) {
    match params.platform() {
        Platform::Field(f) => {
            secret.put("p", f.p());
            secret.put("pm1-factors", f.pm1_factorization());
        }
        Platform::Ring(r) => {
            secret.put("p", r.p());
            secret.put("q", r.q());
            secret.put("phi", r.phi());
            secret.put("pm1-factors", r.pm1_factorization());
            secret.put("qm1-factors", r.qm1_factorization());
        }
    }
    secret.put("h-orders", join(params.mask_subgroup().secret_orders().unwrap_or_default()));
    secret.put("u-orders", join(params.message_subgroup().secret_orders().unwrap_or_default()));
}

fn subgroup(section: &Section, name: &str, modulus: &BigUint) -> Result<SubgroupSpec> {
    core(SubgroupSpec::public(modulus, section.elements(name, modulus)?), name)
}

pub fn read_public(doc: &KeyDocument) -> Result<PublicKey> {
    let p = &doc.public;
    Ok(match doc.scheme {
        Scheme::FieldMask | Scheme::RingMask => {
            let modulus = p.int("modulus")?;
            PublicKey::Mask(
                doc.scheme,
                MaskPublicKey {
                    h: subgroup(p, "h", &modulus)?,
                    u: subgroup(p, "u", &modulus)?,
                    modulus,
                },
            )
        }
        Scheme::RsaMask => {
            let n = p.int("modulus")?;
            PublicKey::Rsa(RsaMaskPublicKey {
                h: subgroup(p, "h", &n)?,
                u: subgroup(p, "u", &n)?,
                e: p.int("e")?,
                n,
            })
        }
        Scheme::ElGamalSubgroup => {
            let modulus = p.int("p")?;
            PublicKey::ElGamal(ElGamalPublicKey {
                g: p.element("g", &modulus)?,
                y: p.element("y", &modulus)?,
                gb: p.element("gb", &modulus)?,
                p: modulus,
            })
        }
        Scheme::DhSubgroup => {
            let modulus = p.int("p")?;
            PublicKey::Dh(DhPublic {
                g: p.element("g", &modulus)?,
                r1: p.int("r1")?,
                s1: p.int("s1")?,
                h: subgroup(p, "h", &modulus)?,
                u: subgroup(p, "u", &modulus)?,
                p: modulus,
            })
        }
    })
}

fn secret_subgroup(public: &Section, secret: &Section, gens: &str, orders: &str, modulus: &BigUint) -> Result<SubgroupSpec> {
    core(
        SubgroupSpec::with_secret_orders(modulus, public.elements(gens, modulus)?, secret.ints(orders)?),
        orders,
    )
}

fn read_mask_params(doc: &KeyDocument, secret: &Section) -> Result<MaskParams> {
    let public = &doc.public;
    let modulus = public.int("modulus")?;
    let field = |p: &str, f: &str| core(FieldParams::new(secret.int(p)?, secret.factorization(f)?), p);
    let platform = match doc.scheme {
        Scheme::FieldMask => {
            let f = field("p", "pm1-factors")?;
            if f.p() != &modulus {
                return bad("secret p does not match the public modulus");
            }
            Platform::Field(f)
        }
        _ => {
            let ring = core(RingParams::new(field("p", "pm1-factors")?, field("q", "qm1-factors")?), "ring")?;
            if ring.n() != &modulus || ring.phi() != &secret.int("phi")? {
                return bad("secret p, q, phi inconsistent with the public modulus");
            }
            Platform::Ring(ring)
        }
    };
    let h = secret_subgroup(public, secret, "h", "h-orders", &modulus)?;
    let u = secret_subgroup(public, secret, "u", "u-orders", &modulus)?;
    core(MaskParams::new(platform, h, u), "mask parameters")
}

pub fn read_secret(doc: &KeyDocument) -> Result<SecretKey> {
    let Some(secret) = &doc.secret else {
        return bad("not a secret key file: missing [secret] section");
    };
    let key = match doc.scheme {
        Scheme::FieldMask | Scheme::RingMask => {
            let params = read_mask_params(doc, secret)?;
            let keys = mask_keygen(params);
            SecretKey::Mask(doc.scheme, keys)
        }
        Scheme::RsaMask => {
            let params = read_mask_params(doc, secret)?;
            SecretKey::Rsa(core(rsa_mask_keygen(params, &doc.public.int("e")?), "rsa exponent")?)
        }
        Scheme::ElGamalSubgroup => {
            let PublicKey::ElGamal(public) = read_public(doc)? else {
                unreachable!("scheme checked")
            };
            let secret = ElGamalSecretKey {
                r: secret.int("r")?,
                s: secret.int("s")?,
                a: secret.int("a")?,
                k: secret.int("k")?,
                t: secret.int("t")?,
                pm1: secret.factorization("pm1-factors")?,
            };
            SecretKey::ElGamal(core(ElGamalKeyPair::from_parts(public, secret), "elgamal key")?)
        }
        Scheme::DhSubgroup => {
            let PublicKey::Dh(public) = read_public(doc)? else {
                unreachable!("scheme checked")
            };
            let pm1 = secret.factorization("pm1-factors")?;
            let field = core(FieldParams::new(public.p.clone(), pm1.clone()), "dh prime")?;
            let session = DhSession {
                h: secret_subgroup(&doc.public, secret, "h", "h-orders", field.p())?,
                u: secret_subgroup(&doc.public, secret, "u", "u-orders", field.p())?,
                r: secret.int("r")?,
                s: secret.int("s")?,
                p: public.p,
                g: public.g,
                r1: public.r1,
                s1: public.s1,
                pm1,
            };
            if session.h.secret_exponent() != Some(&session.r) || session.u.secret_exponent() != Some(&session.s) {
                return bad("subgroup exponents do not match r and s");
            }
            SecretKey::Dh(session)
        }
    };
    // stored derived values must match what the key re-derives
    if &key.to_document() != doc {
        return bad("secret fields are inconsistent with the key they describe");
    }
    Ok(key)
}

/// A ciphertext file: `scheme`, `modulus`, `mode`, `value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiphertextFile {
    pub scheme: Scheme,
    pub mode: CodecMode,
    pub ciphertext: Ciphertext,
}

impl CiphertextFile {
    pub fn render(&self) -> String {
        format!(
            "scheme = {}\nmodulus = {}\nmode = {}\nvalue = {}\n",
            self.scheme.name(),
            self.ciphertext.value.modulus(),
            self.mode,
            self.ciphertext.value
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = Section::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return bad(format!("line {}: expected `name = value`", lineno + 1));
            };
            fields.put(k.trim(), v.trim());
        }
        fields.check_fields(&["scheme", "modulus", "mode", "value"], "ciphertext")?;
        let modulus = fields.int("modulus")?;
        if modulus < BigUint::from(2u8) {
            return bad("modulus must be at least 2");
        }
        Ok(CiphertextFile {
            scheme: Scheme::parse(fields.get("scheme")?)?,
            mode: fields
                .get("mode")?
                .parse()
                .map_err(|e: crate::Error| FormatError(e.to_string()))?,
            ciphertext: Ciphertext {
                value: fields.element("value", &modulus)?,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paramgen::build_ring_with_orders;
    use crate::schemes::{dh_setup, elgamal_keygen};
    use crate::RngState;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn sample_keys() -> Vec<SecretKey> {
        let mut rng = RngState::from_seed(3);
        let (_, field) = crate::paramgen::build_field_mask_params(&[big(3)], &[big(5)], 5, &mut rng).unwrap();
        let (_, ring) = build_ring_with_orders(&[big(3), big(4)], &[big(5)], 48, &mut rng).unwrap();
        vec![
            SecretKey::Mask(Scheme::FieldMask, mask_keygen(field)),
            SecretKey::Mask(Scheme::RingMask, mask_keygen(ring.clone())),
            SecretKey::Rsa(rsa_mask_keygen(ring, &big(3)).unwrap()),
            SecretKey::ElGamal(elgamal_keygen(&big(3), &big(5), 32, &mut rng).unwrap()),
            SecretKey::Dh(dh_setup(&big(12), &big(35), 40, &mut rng).unwrap()),
        ]
    }

    #[test]
    fn secret_documents_round_trip() {
        for key in sample_keys() {
            let text = key.to_document().render();
            let doc = KeyDocument::parse(&text).unwrap();
            assert_eq!(read_secret(&doc).unwrap(), key);
            let public_text = doc.public_only().render();
            let public_doc = KeyDocument::parse(&public_text).unwrap();
            assert!(public_doc.secret.is_none());
            assert!(read_secret(&public_doc).is_err());
            read_public(&public_doc).unwrap();
            assert!(text.starts_with(&public_text));
        }
    }

    #[test]
    fn public_file_has_no_secret_values() {
        let key = &sample_keys()[1];
        let SecretKey::Mask(_, keys) = key else { unreachable!() };
        let Platform::Ring(ring) = keys.params().platform() else { unreachable!() };
        let public_text = key.to_document().public_only().render();
        assert!(!public_text.contains("[secret]"));
        assert!(!public_text.contains(&ring.p().to_string()));
        assert!(!public_text.contains(&ring.phi().to_string()));
    }

    #[test]
    fn rejects_malformed_documents() {
        let text = sample_keys()[0].to_document().render();
        let cases = [
            text.replace("version = 1", "version = 2"),
            text.replace("scheme = field-mask", "scheme = pem"),
            text.replace("[public]", "[public]\ncolor = blue"),
            text.replace("[secret]", "[secret]\nr = 3"),
            text.replace("t = 2", "t = 3"),
            text.replace("d = 6", "d = 7"),
            text.replace("[public]\n", "[public]\nmodulus = 31\n"),
            text.replace("[public]", "[private]"),
            text.replace("h = ", "h = x"),
            text.replace("pm1-factors = 2*3*5", "pm1-factors = 2*15"),
        ];
        for case in cases {
            assert_ne!(case, text);
            let result = KeyDocument::parse(&case).and_then(|d| read_secret(&d));
            assert!(result.is_err(), "accepted:\n{case}");
        }
    }

    #[test]
    fn ciphertext_file_round_trip_and_validation() {
        let file = CiphertextFile {
            scheme: Scheme::FieldMask,
            mode: CodecMode::Exponent,
            ciphertext: Ciphertext {
                value: GroupElement::new(big(10), big(31)).unwrap(),
            },
        };
        let text = file.render();
        assert_eq!(text, "scheme = field-mask\nmodulus = 31\nmode = exponent\nvalue = 10\n");
        assert_eq!(CiphertextFile::parse(&text).unwrap(), file);
        for broken in [
            text.replace("value = 10", "value = 0"),
            text.replace("value = 10", "value = 31"),
            text.replace("mode = exponent", "mode = raw"),
            text.replace("value = 10\n", ""),
            format!("{text}extra = 1\n"),
        ] {
            assert!(CiphertextFile::parse(&broken).is_err(), "{broken}");
        }
    }
}
