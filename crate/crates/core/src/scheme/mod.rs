//! Key generation, signing and verification.
//!
//! The private key is `{P, G, S}` and the public key is
//! `H' = P^-1 * H * S^-1`. A signature on `m` is `sigma = (e + c) * S^T`
//! where `e = [0 | s']`, `s' = s * P` for the syndrome `s = F_Theta(H(m))`,
//! and `c` is a random low-weight codeword. Codewords are redrawn until
//! `sigma` has no zero entry. Then `H' * sigma^T = s`.
//!
//! Keys are one-time: signing two different messages with the same key
//! voids the security argument. Nothing here enforces that.

mod codec;
mod hash;

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ldgm::LdgmCode;
use crate::params::ParameterSet;
use crate::qcalg::{QCMatrix, QCPermutation, SparseVector};

pub use codec::{encoded_header_len, object_kind, ObjectKind, FORMAT_VERSION, MAGIC};
pub use hash::{choose_theta, derive_syndrome, message_digest, ThetaMode, THETA_LEN};

/// Draws of `S` before key generation gives up.
pub const MAX_TRANSFORM_ATTEMPTS: u32 = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    params: ParameterSet,
    h_pub: QCMatrix,
}

impl PublicKey {
    pub fn new(params: ParameterSet, h_pub: QCMatrix) -> Result<Self> {
        params.validate()?;
        if h_pub.field().q() as u16 != params.q
            || h_pub.p() != params.p
            || h_pub.rows0() != params.r0()
            || h_pub.cols0() != params.n0
        {
            return Err(Error::DimensionMismatch(
                "public matrix does not match the parameters".into(),
            ));
        }
        Ok(Self { params, h_pub })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    /// `H' = P^-1 * H * S^-1`.
    pub fn matrix(&self) -> &QCMatrix {
        &self.h_pub
    }
}

#[derive(Clone, Debug)]
pub struct PrivateKey {
    params: ParameterSet,
    perm: QCPermutation,
    code: LdgmCode,
    s: QCMatrix,
    s_inv: OnceLock<QCMatrix>,
}

impl PartialEq for PrivateKey {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.perm == other.perm
            && self.code == other.code
            && self.s == other.s
    }
}

impl Eq for PrivateKey {}

impl PrivateKey {
    pub fn new(
        params: ParameterSet,
        perm: QCPermutation,
        code: LdgmCode,
        s: QCMatrix,
    ) -> Result<Self> {
        params.validate()?;
        let f = params.field()?;
        let fits = |m: &QCMatrix, r0, c0| {
            m.field() == f && m.p() == params.p && m.rows0() == r0 && m.cols0() == c0
        };
        if perm.p() != params.p || perm.blocks() != params.r0() {
            return Err(Error::DimensionMismatch(
                "permutation does not match the parameters".into(),
            ));
        }
        if !fits(code.g(), params.k0, params.n0) || !fits(&s, params.n0, params.n0) {
            return Err(Error::DimensionMismatch(
                "private matrices do not match the parameters".into(),
            ));
        }
        Ok(Self {
            params,
            perm,
            code,
            s,
            s_inv: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn permutation(&self) -> &QCPermutation {
        &self.perm
    }

    pub fn code(&self) -> &LdgmCode {
        &self.code
    }

    /// The sparse transform `S`.
    pub fn transform(&self) -> &QCMatrix {
        &self.s
    }

    /// `S^-1`, computed on first use for keys read from storage.
    pub fn transform_inverse(&self) -> Result<&QCMatrix> {
        if let Some(inv) = self.s_inv.get() {
            return Ok(inv);
        }
        let inv = self
            .s
            .inverse()?
            .ok_or_else(|| Error::InvalidParameters("private transform S is singular".into()))?;
        Ok(self.s_inv.get_or_init(|| inv))
    }

    pub fn public_key(&self) -> Result<PublicKey> {
        let h_s = self.code.h().mul(self.transform_inverse()?)?;
        PublicKey::new(self.params.clone(), self.perm.permute_rows(&h_s)?)
    }
}

/// `(sigma, Theta*)` together with the parameters it was made under.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    params: ParameterSet,
    theta: Vec<u8>,
    sigma: Vec<u8>,
}

impl Signature {
    pub fn new(params: ParameterSet, theta: Vec<u8>, sigma: Vec<u8>) -> Result<Self> {
        params.validate()?;
        if sigma.len() != params.n() {
            return Err(Error::DimensionMismatch(format!(
                "sigma of length {} for n = {}",
                sigma.len(),
                params.n()
            )));
        }
        if let Some(&v) = sigma.iter().find(|&&v| v as u16 >= params.q) {
            return Err(Error::NonCanonical {
                value: v,
                q: params.q as u8,
            });
        }
        if theta.len() > u16::MAX as usize {
            return Err(Error::InvalidParameters(
                "Theta longer than 65535 bytes".into(),
            ));
        }
        Ok(Self {
            params,
            theta,
            sigma,
        })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn theta(&self) -> &[u8] {
        &self.theta
    }

    pub fn sigma(&self) -> &[u8] {
        &self.sigma
    }
}

fn sample_transform<R: Rng + ?Sized>(
    params: &ParameterSet,
    rng: &mut R,
) -> Result<(QCMatrix, QCMatrix)> {
    let f = params.field()?;
    let sampler = params.density.sampler();
    let mut data = vec![0u8; params.n0 * params.n0 * params.p];
    for _ in 0..MAX_TRANSFORM_ATTEMPTS {
        sampler.fill(rng, &mut data);
        let s = QCMatrix::from_raw(f, params.p, params.n0, params.n0, data.clone())?;
        if let Some(inv) = s.inverse()? {
            return Ok((s, inv));
        }
    }
    Err(Error::KeygenFailed(format!(
        "no invertible S in {MAX_TRANSFORM_ATTEMPTS} draws from d(x) = {}",
        params.density
    )))
}

/// Generates a one-time key pair.
pub fn keygen<R: Rng + ?Sized>(
    params: &ParameterSet,
    rng: &mut R,
) -> Result<(PrivateKey, PublicKey)> {
    params.validate()?;
    let code = LdgmCode::generate(params, rng)?;
    let perm = QCPermutation::random(params.p, params.r0(), rng);
    let (s, s_inv) = sample_transform(params, rng)?;
    let sk = PrivateKey::new(params.clone(), perm, code, s)?;
    let _ = sk.s_inv.set(s_inv);
    let pk = sk.public_key()?;
    Ok((sk, pk))
}

/// Signs `message` and also reports how many codewords were tried.
pub fn sign_counted<R: Rng + ?Sized>(
    sk: &PrivateKey,
    message: &[u8],
    mode: ThetaMode,
    rng: &mut R,
) -> Result<(Signature, u32)> {
    let params = &sk.params;
    let f = params.field()?;
    let theta = choose_theta(message, mode, rng);
    let s = derive_syndrome(message, &theta, params)?;
    let e = sk.perm.apply(&s)?.embed(params.n(), params.k())?;
    for attempt in 1..=params.max_sign_attempts {
        let c = sk.code.random_codeword(params.m_g, rng)?;
        let sigma = sk.s.mul_sparse_vec(&e.add(&c, f)?)?;
        if sigma.iter().all(|&v| v != 0) {
            return Ok((Signature::new(params.clone(), theta, sigma)?, attempt));
        }
    }
    Err(Error::SignAttemptsExhausted {
        attempts: params.max_sign_attempts,
    })
}

/// Signs `message`, retrying codewords until `sigma` is zero-free.
pub fn sign<R: Rng + ?Sized>(
    sk: &PrivateKey,
    message: &[u8],
    mode: ThetaMode,
    rng: &mut R,
) -> Result<Signature> {
    sign_counted(sk, message, mode, rng).map(|(sig, _)| sig)
}

/// Why a signature was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// The signature was made under different parameters.
    ParameterMismatch,
    Malformed(String),
    ZeroEntry {
        index: usize,
    },
    SyndromeWeight {
        found: usize,
    },
    SyndromeMismatch,
}

impl RejectReason {
    /// Stable short name.
    pub fn name(&self) -> &'static str {
        match self {
            Self::ParameterMismatch => "parameter-mismatch",
            Self::Malformed(_) => "malformed",
            Self::ZeroEntry { .. } => "zero-entry",
            Self::SyndromeWeight { .. } => "syndrome-weight",
            Self::SyndromeMismatch => "syndrome-mismatch",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Malformed(m) => write!(f, "malformed: {m}"),
            Self::ZeroEntry { index } => write!(f, "zero-entry at position {index}"),
            Self::SyndromeWeight { found } => write!(f, "syndrome-weight {found}"),
            other => f.write_str(other.name()),
        }
    }
}

impl std::error::Error for RejectReason {}

/// Accepts iff `sigma` is zero-free, `F_Theta(H(m))` has weight `w`, and
/// `H' * sigma^T` equals it.
pub fn verify(
    pk: &PublicKey,
    message: &[u8],
    sig: &Signature,
) -> std::result::Result<(), RejectReason> {
    let params = &pk.params;
    if sig.params != *params {
        return Err(RejectReason::ParameterMismatch);
    }
    if let Some(index) = sig.sigma.iter().position(|&v| v == 0) {
        return Err(RejectReason::ZeroEntry { index });
    }
    let s = derive_syndrome(message, &sig.theta, params)
        .map_err(|e| RejectReason::Malformed(e.to_string()))?;
    if s.weight() != params.w {
        return Err(RejectReason::SyndromeWeight { found: s.weight() });
    }
    let got = pk
        .h_pub
        .mul_vec(&sig.sigma)
        .map_err(|e| RejectReason::Malformed(e.to_string()))?;
    if SparseVector::from_dense(&got) != s {
        return Err(RejectReason::SyndromeMismatch);
    }
    Ok(())
}
