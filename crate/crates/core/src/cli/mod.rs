// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 DH key mismatch, 2 parameter conflict,
//! 3 prime search failure, 4 enumeration too large, 64 usage error,
//! 65 malformed input data, 74 I/O failure.

pub mod keyfile;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::RngCore;

use crate::codec::{decode_exponent, encode_exponent, kem_sample, CodecMode};
use crate::oracles::{self, MembershipAdversary, DEFAULT_CAP};
use crate::paramgen::{build_field_mask_params, build_ring_with_orders};
use crate::schemes::{
    dh_alice_message, dh_bob_message, dh_derive, dh_setup, elgamal_decrypt, elgamal_encrypt,
    elgamal_encrypt_with_nonce, elgamal_keygen, mask_decrypt, mask_encrypt, mask_encrypt_with_mask, mask_keygen,
    rsa_mask_decrypt, rsa_mask_encrypt, rsa_mask_encrypt_with_mask, rsa_mask_keygen,
};
use crate::{Ciphertext, Error, GroupElement, RngState, SubgroupSpec};
use keyfile::{CiphertextFile, FormatError, KeyDocument, PublicKey, Scheme, SecretKey};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFLICT: i32 = 2;
pub const EXIT_SEARCH: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "submask", version, about = "Subgroup-masking encryption toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key pair and write PREFIX.pub and PREFIX.key.
    Keygen(KeygenArgs),
    /// Encrypt a message or a fresh KEM element under a public key.
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext file with a secret key.
    Decrypt(DecryptArgs),
    /// Run a full subgroup Diffie-Hellman exchange.
    Dh(DhArgs),
    /// Brute-force group queries on small moduli.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
    /// Play the two-message distinguishing game against the ElGamal variant.
    Game(GameArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Profile {
    /// 32-bit primes, 64-bit ring modulus.
    Demo,
    /// 1024-bit primes, 2048-bit ring modulus.
    Standard,
}

#[derive(Args, Debug)]
struct KeygenArgs {
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// Modulus size in bits; overrides the profile.
    #[arg(long)]
    bits: Option<u64>,
    #[arg(long, value_enum, default_value = "demo")]
    profile: Profile,
    /// Mask subgroup orders, comma-separated.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_int)]
    r: Vec<BigUint>,
    /// Message subgroup orders, comma-separated.
    #[arg(long, required = true, value_delimiter = ',', value_parser = parse_int)]
    s: Vec<BigUint>,
    /// RSA public exponent (rsa-mask only).
    #[arg(long, default_value = "65537", value_parser = parse_int)]
    e: BigUint,
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("payload").args(["message", "input", "kem"]))]
struct EncryptArgs {
    /// Public (or secret) key file.
    #[arg(long)]
    key: PathBuf,
    /// Integer message, encoded as u1^m.
    #[arg(long, value_parser = parse_int)]
    message: Option<BigUint>,
    /// File holding the integer message.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Encrypt a fresh random message-subgroup element (the default).
    #[arg(long)]
    kem: bool,
    /// Ciphertext output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed mask element (nonce for elgamal-subgroup), for test vectors.
    #[arg(long, hide = true, value_parser = parse_int)]
    force_mask: Option<BigUint>,
}

#[derive(Args, Debug)]
struct DecryptArgs {
    /// Secret key file.
    #[arg(long)]
    key: PathBuf,
    /// Ciphertext file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Plaintext output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DhArgs {
    #[arg(long, value_parser = parse_int)]
    r: BigUint,
    #[arg(long, value_parser = parse_int)]
    s: BigUint,
    #[arg(long, default_value_t = 32)]
    bits: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Corrupt Bob's message in transit.
    #[arg(long, hide = true)]
    tamper: bool,
}

#[derive(Subcommand, Debug)]
enum OracleQuery {
    /// Multiplicative order of an element.
    Order {
        #[arg(long = "mod", value_parser = parse_int)]
        modulus: BigUint,
        #[arg(long, value_parser = parse_int)]
        elem: BigUint,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Exponent of the subgroup spanned by the generators.
    Exponent {
        #[arg(long = "mod", value_parser = parse_int)]
        modulus: BigUint,
        #[arg(long, required = true, value_delimiter = ',', value_parser = parse_int)]
        gens: Vec<BigUint>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Whether an element lies in the subgroup spanned by the generators.
    Member {
        #[arg(long = "mod", value_parser = parse_int)]
        modulus: BigUint,
        #[arg(long, required = true, value_delimiter = ',', value_parser = parse_int)]
        gens: Vec<BigUint>,
        #[arg(long, value_parser = parse_int)]
        elem: BigUint,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Whether an element is a square modulo p·q.
    Qr {
        #[arg(long, value_parser = parse_int)]
        p: BigUint,
        #[arg(long, value_parser = parse_int)]
        q: BigUint,
        #[arg(long, value_parser = parse_int)]
        elem: BigUint,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AdversaryKind {
    Random,
    /// Solves mask-subgroup membership by enumeration.
    Brute,
    /// Always guesses 0.
    Zero,
}

#[derive(Args, Debug)]
struct GameArgs {
    #[arg(long, default_value = "3", value_parser = parse_int)]
    r: BigUint,
    #[arg(long, default_value = "5", value_parser = parse_int)]
    s: BigUint,
    #[arg(long, default_value_t = 5)]
    bits: u64,
    #[arg(long, value_enum)]
    adversary: AdversaryKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Enumeration limit for the brute adversary.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
}

fn parse_int(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("`{s}` is not a non-negative decimal integer"));
    }
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Format(String),
    Io(PathBuf, std::io::Error),
    Conflict(String),
    Core(Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Format(_) => EXIT_DATA,
            CliError::Io(..) => EXIT_IO,
            CliError::Conflict(_) => EXIT_CONFLICT,
            CliError::Core(e) => match e {
                Error::ParameterConflict(_) | Error::BadPublicExponent => EXIT_CONFLICT,
                Error::SearchFailure(_) => EXIT_SEARCH,
                Error::TooLarge { .. } => EXIT_TOO_LARGE,
                Error::InvalidElement(_)
                | Error::InconsistentFactorization(_)
                | Error::InvalidSubgroup(_)
                | Error::NotInSubgroup => EXIT_DATA,
                _ => EXIT_USAGE,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Format(m) | CliError::Conflict(m) => m.clone(),
            CliError::Io(path, e) => format!("{}: {e}", path.display()),
            CliError::Core(e) => e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e.0)
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Keygen(a) => keygen(a, out, err),
        Command::Encrypt(a) => encrypt(a, out, err),
        Command::Decrypt(a) => decrypt(a, out),
        Command::Dh(a) => dh(a, out, err),
        Command::Oracle { query } => oracle(query, out),
        Command::Game(a) => game(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn seeded(seed: Option<u64>, err: &mut dyn Write) -> RngState {
    let seed = seed.unwrap_or_else(|| {
        let s = rand::rngs::OsRng.next_u64();
        let _ = writeln!(err, "seed = {s}");
        s
    });
    RngState::from_seed(seed)
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(PathBuf::from("<stdout>"), e)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn keygen(a: KeygenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    if a.r.is_empty() || a.s.is_empty() {
        return Err(CliError::Usage("--r and --s are required".into()));
    }
    let ring_scheme = matches!(a.scheme, Scheme::RingMask | Scheme::RsaMask);
    let bits = a.bits.unwrap_or(match (a.profile, ring_scheme) {
        (Profile::Demo, false) => 32,
        (Profile::Demo, true) => 64,
        (Profile::Standard, false) => 1024,
        (Profile::Standard, true) => 2048,
    });
    let single = |list: &[BigUint], name: &str| -> CliResult<BigUint> {
        match list {
            [v] => Ok(v.clone()),
            _ => Err(CliError::Usage(format!(
                "{} takes a single --{name} value",
                a.scheme.name()
            ))),
        }
    };
    let mut rng = seeded(a.seed, err);
    let key = match a.scheme {
        Scheme::FieldMask => {
            let (_, params) = build_field_mask_params(&a.r, &a.s, bits, &mut rng)?;
            SecretKey::Mask(a.scheme, mask_keygen(params))
        }
        Scheme::RingMask => {
            let (_, params) = build_ring_with_orders(&a.r, &a.s, bits, &mut rng)?;
            SecretKey::Mask(a.scheme, mask_keygen(params))
        }
        Scheme::RsaMask => {
            let (_, params) = build_ring_with_orders(&a.r, &a.s, bits, &mut rng)?;
            SecretKey::Rsa(rsa_mask_keygen(params, &a.e)?)
        }
        Scheme::ElGamalSubgroup => {
            let (r, s) = (single(&a.r, "r")?, single(&a.s, "s")?);
            SecretKey::ElGamal(elgamal_keygen(&r, &s, bits, &mut rng)?)
        }
        Scheme::DhSubgroup => {
            let (r, s) = (single(&a.r, "r")?, single(&a.s, "s")?);
            SecretKey::Dh(dh_setup(&r, &s, bits, &mut rng)?)
        }
    };
    let doc = key.to_document();
    let pub_path = with_suffix(&a.out, ".pub");
    let key_path = with_suffix(&a.out, ".key");
    write_file(&pub_path, &doc.public_only().render())?;
    write_file(&key_path, &doc.render())?;
    writeln!(out, "wrote {} and {}", pub_path.display(), key_path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

fn message_subgroup(key: &PublicKey) -> SubgroupSpec {
    match key {
        PublicKey::Mask(_, k) => k.u.clone(),
        PublicKey::Rsa(k) => k.u.clone(),
        PublicKey::ElGamal(k) => k.message_subgroup(),
        PublicKey::Dh(k) => k.u.clone(),
    }
}

fn encrypt(a: EncryptArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let doc = KeyDocument::parse(&read(&a.key)?)?;
    let key = keyfile::read_public(&doc)?;
    if let PublicKey::Dh(_) = key {
        return Err(CliError::Conflict("dh-subgroup keys cannot encrypt; use `submask dh`".into()));
    }
    let u_spec = message_subgroup(&key);
    let mut rng = seeded(a.seed, err);
    let message = match (a.message, a.input) {
        (Some(m), _) => Some(m),
        (None, Some(path)) => {
            Some(parse_int(&read(&path)?).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?)
        }
        (None, None) => None,
    };
    let encoded = match message {
        Some(m) => encode_exponent(&m, &u_spec)?,
        None => kem_sample(&u_spec, &mut rng)?,
    };
    let u = &encoded.element;
    let forced = |v: &BigUint, modulus: &BigUint| GroupElement::new(v.clone(), modulus.clone());
    let ciphertext: Ciphertext = match (&key, &a.force_mask) {
        (PublicKey::Mask(_, k), Some(h)) => mask_encrypt_with_mask(k, u, &forced(h, &k.modulus)?)?,
        (PublicKey::Mask(_, k), None) => mask_encrypt(k, u, &mut rng)?,
        (PublicKey::Rsa(k), Some(h)) => rsa_mask_encrypt_with_mask(k, u, &forced(h, &k.n)?)?,
        (PublicKey::Rsa(k), None) => rsa_mask_encrypt(k, u, &mut rng)?,
        (PublicKey::ElGamal(k), Some(l)) => elgamal_encrypt_with_nonce(k, u, l)?,
        (PublicKey::ElGamal(k), None) => elgamal_encrypt(k, u, &mut rng)?,
        (PublicKey::Dh(_), _) => unreachable!("rejected above"),
    };
    let file = CiphertextFile {
        scheme: doc.scheme,
        mode: encoded.mode,
        ciphertext,
    };
    if encoded.mode == CodecMode::Kem {
        writeln!(out, "element = {}", encoded.element).map_err(io)?;
    }
    match &a.out {
        Some(path) => write_file(path, &file.render())?,
        None => out.write_all(file.render().as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}

fn decrypt(a: DecryptArgs, out: &mut dyn Write) -> CliResult<i32> {
    let doc = KeyDocument::parse(&read(&a.key)?)?;
    let key = keyfile::read_secret(&doc)?;
    let file = CiphertextFile::parse(&read(&a.input)?)?;
    if file.scheme != key.scheme() {
        return Err(CliError::Conflict(format!(
            "ciphertext is for {}, key is for {}",
            file.scheme.name(),
            key.scheme().name()
        )));
    }
    let c = &file.ciphertext;
    let (plain, u_spec, s) = match &key {
        SecretKey::Mask(_, k) => (
            mask_decrypt(k, c)?,
            k.params().message_subgroup().clone(),
            first_order(k.params().message_subgroup()),
        ),
        SecretKey::Rsa(k) => (
            rsa_mask_decrypt(k, c)?,
            k.params().message_subgroup().clone(),
            first_order(k.params().message_subgroup()),
        ),
        SecretKey::ElGamal(k) => (
            elgamal_decrypt(k, c)?,
            k.public.message_subgroup(),
            k.secret.s.clone(),
        ),
        SecretKey::Dh(_) => return Err(CliError::Conflict("dh-subgroup keys cannot decrypt".into())),
    };
    let text = match file.mode {
        CodecMode::Exponent => format!("{}\n", decode_exponent(&plain, &u_spec, &s)?),
        CodecMode::Kem => format!("element = {plain}\n"),
    };
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}

fn first_order(u: &SubgroupSpec) -> BigUint {
    u.secret_orders()
        .and_then(|o| o.first())
        .cloned()
        .expect("secret keys carry subgroup orders")
}

fn dh(a: DhArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let mut rng = seeded(a.seed, err);
    let session = dh_setup(&a.r, &a.s, a.bits, &mut rng)?;
    let public = session.public();
    let (b, u) = session.sample_bob(&mut rng)?;
    let (alice_a, h) = session.sample_alice(&mut rng)?;
    let mut to_alice = dh_bob_message(&public, &session.r, &b, &u)?;
    let to_bob = dh_alice_message(&public, &session.s, &alice_a, &h)?;
    if a.tamper {
        to_alice = to_alice.mul(&public.g)?;
    }
    let bob_key = dh_derive(&to_bob, &b, &session.r);
    let alice_key = dh_derive(&to_alice, &alice_a, &session.s);
    let join = |s: &SubgroupSpec| s.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",");
    let matched = bob_key == alice_key;
    let text = format!(
        "p = {}\ng = {}\nr1 = {}\ns1 = {}\nh = {}\nu = {}\nbob -> alice = {}\nalice -> bob = {}\nbob key = {}\nalice key = {}\n{}\n",
        public.p,
        public.g,
        public.r1,
        public.s1,
        join(&public.h),
        join(&public.u),
        to_alice,
        to_bob,
        bob_key,
        alice_key,
        if matched { "MATCH" } else { "MISMATCH" }
    );
    out.write_all(text.as_bytes()).map_err(io)?;
    Ok(if matched { EXIT_OK } else { EXIT_MISMATCH })
}

fn elements(values: &[BigUint], modulus: &BigUint) -> CliResult<Vec<GroupElement>> {
    Ok(values
        .iter()
        .map(|v| GroupElement::new(v.clone(), modulus.clone()))
        .collect::<crate::Result<_>>()?)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn oracle(query: OracleQuery, out: &mut dyn Write) -> CliResult<i32> {
    let answer = match query {
        OracleQuery::Order { modulus, elem, cap } => {
            let g = GroupElement::new(elem, modulus)?;
            oracles::brute_order(&g, cap)?.to_string()
        }
        OracleQuery::Exponent { modulus, gens, cap } => {
            let h = SubgroupSpec::public(&modulus, elements(&gens, &modulus)?)?;
            oracles::brute_exponent(&h, cap)?.to_string()
        }
        OracleQuery::Member {
            modulus,
            gens,
            elem,
            cap,
        } => {
            let h = SubgroupSpec::public(&modulus, elements(&gens, &modulus)?)?;
            let f = GroupElement::new(elem, modulus)?;
            yes_no(oracles::brute_membership(&f, &h, cap)?).to_string()
        }
        OracleQuery::Qr { p, q, elem } => {
            let f = GroupElement::new(elem, &p * &q)?;
            yes_no(oracles::qr_by_euler(&f, &p, &q)?).to_string()
        }
    };
    writeln!(out, "{answer}").map_err(io)?;
    Ok(EXIT_OK)
}

fn game(a: GameArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let mut rng = seeded(a.seed, err);
    let keys = elgamal_keygen(&a.r, &a.s, a.bits, &mut rng)?;
    let public = keys.public;
    let result = match a.adversary {
        AdversaryKind::Random => oracles::ind_game(&public, oracles::random_adversary, a.trials, &mut rng)?,
        AdversaryKind::Zero => oracles::ind_game(&public, oracles::constant_adversary, a.trials, &mut rng)?,
        AdversaryKind::Brute => {
            let adversary = MembershipAdversary::new(&public, a.cap)?;
            oracles::ind_game(&public, |_, u0, _, c, _| adversary.guess(u0, c), a.trials, &mut rng)?
        }
    };
    let text = format!(
        "p = {}\ntrials = {}\nwins = {}\nadvantage = {:.4}\n",
        public.p,
        result.trials,
        result.adversary_wins,
        result.advantage()
    );
    out.write_all(text.as_bytes()).map_err(io)?;
    Ok(EXIT_OK)
}
