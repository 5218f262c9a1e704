//! The `SPNS` object format. All integers are little-endian.
//!
//! ```text
//! "SPNS" | version u16 | type u8 | params block | payload
//! params block: q p n0 k0 w w_g m_g (u16 each) | len u16 | len x (i u8, num u32, den u32)
//! ```
//!
//! Payloads:
//!
//! - params: `max_sign_attempts u32`
//! - public: `r0 * n0` circulant rows of `p` bytes
//! - private: block permutation (`r0 x u16`), shifts (`r0 x u16`), then for
//!   each of the `k0` block rows of `G` its first-row support as
//!   `count u32 | positions u32[count] | values u8[count]`, then `S` as
//!   `n0 * n0` circulant rows of `p` bytes
//! - signature: `len u16 | Theta | n bytes of sigma`

use crate::error::{Error, ParseError};
use crate::ldgm::LdgmCode;
use crate::params::{DensityPolynomial, DensityTerm, ParameterSet, DEFAULT_MAX_SIGN_ATTEMPTS};
use crate::qcalg::{QCMatrix, QCPermutation};

use super::{PrivateKey, PublicKey, Signature};

pub const MAGIC: &[u8; 4] = b"SPNS";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Params = 1,
    PublicKey = 2,
    PrivateKey = 3,
    Signature = 4,
}

impl ObjectKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Params => "params",
            Self::PublicKey => "public key",
            Self::PrivateKey => "private key",
            Self::Signature => "signature",
        }
    }

    fn from_tag(tag: u8) -> Result<Self, ParseError> {
        Ok(match tag {
            1 => Self::Params,
            2 => Self::PublicKey,
            3 => Self::PrivateKey,
            4 => Self::Signature,
            other => return Err(ParseError::UnknownObjectType(other)),
        })
    }
}

/// Reads just the header to tell what an encoded object is.
pub fn object_kind(bytes: &[u8]) -> Result<ObjectKind, ParseError> {
    let mut r = Reader::new(bytes);
    read_header(&mut r)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ParseError> {
        let left = self.buf.len() - self.pos;
        if n > left {
            return Err(ParseError::Truncated {
                offset: self.pos,
                needed: n - left,
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, ParseError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ParseError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, ParseError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    /// `n` symbols, each checked against `q`.
    fn symbols(&mut self, n: usize, q: u16) -> Result<&'a [u8], ParseError> {
        let start = self.pos;
        let bytes = self.take(n)?;
        if let Some(i) = bytes.iter().position(|&v| v as u16 >= q) {
            return Err(ParseError::SymbolOutOfRange {
                offset: start + i,
                value: bytes[i],
                q: q as u8,
            });
        }
        Ok(bytes)
    }

    fn finish(self) -> Result<(), ParseError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            extra => Err(ParseError::TrailingBytes(extra)),
        }
    }
}

fn invalid(e: Error) -> ParseError {
    match e {
        Error::Parse(p) => p,
        other => ParseError::Invalid(other.to_string()),
    }
}

fn read_header(r: &mut Reader<'_>) -> Result<ObjectKind, ParseError> {
    if r.take(4).map_err(|_| ParseError::BadMagic)? != MAGIC {
        return Err(ParseError::BadMagic);
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(ParseError::UnsupportedVersion(version));
    }
    ObjectKind::from_tag(r.u8()?)
}

fn expect_header(r: &mut Reader<'_>, expected: ObjectKind) -> Result<(), ParseError> {
    let found = read_header(r)?;
    if found != expected {
        return Err(ParseError::WrongObjectType {
            expected: expected.name(),
            found: found.name(),
        });
    }
    Ok(())
}

fn read_params(r: &mut Reader<'_>) -> Result<ParameterSet, ParseError> {
    let q = r.u16()?;
    let mut dims = [0usize; 6];
    for d in &mut dims {
        *d = r.u16()? as usize;
    }
    let [p, n0, k0, w, w_g, m_g] = dims;
    let len = r.u16()? as usize;
    let mut terms = Vec::with_capacity(len.min(256));
    for _ in 0..len {
        terms.push(DensityTerm {
            symbol: r.u8()?,
            numerator: r.u32()?,
            denominator: r.u32()?,
        });
    }
    let density = DensityPolynomial::new(terms).map_err(invalid)?;
    let params = ParameterSet {
        q,
        p,
        n0,
        k0,
        w,
        w_g,
        m_g,
        density,
        max_sign_attempts: DEFAULT_MAX_SIGN_ATTEMPTS,
    };
    params.validate().map_err(invalid)?;
    Ok(params)
}

fn write_header(out: &mut Vec<u8>, kind: ObjectKind, params: &ParameterSet) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(kind as u8);
    out.extend_from_slice(&params.q.to_le_bytes());
    for v in [
        params.p, params.n0, params.k0, params.w, params.w_g, params.m_g,
    ] {
        out.extend_from_slice(&(v as u16).to_le_bytes());
    }
    let terms = params.density.terms();
    out.extend_from_slice(&(terms.len() as u16).to_le_bytes());
    for t in terms {
        out.push(t.symbol);
        out.extend_from_slice(&t.numerator.to_le_bytes());
        out.extend_from_slice(&t.denominator.to_le_bytes());
    }
}

/// Header length when `d(x)` has `density_terms` nonzero coefficients.
pub fn encoded_header_len(density_terms: usize) -> usize {
    4 + 2 + 1 + 2 * 8 + 9 * density_terms
}

fn header_len(params: &ParameterSet) -> usize {
    encoded_header_len(params.density.terms().len())
}

impl ParameterSet {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(header_len(self) + 4);
        write_header(&mut out, ObjectKind::Params, self);
        out.extend_from_slice(&self.max_sign_attempts.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ParseError> {
        let mut r = Reader::new(bytes);
        expect_header(&mut r, ObjectKind::Params)?;
        let mut params = read_params(&mut r)?;
        params.max_sign_attempts = r.u32()?;
        r.finish()?;
        params.validate().map_err(invalid)?;
        Ok(params)
    }
}

impl PublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let raw = self.h_pub.as_raw();
        let mut out = Vec::with_capacity(header_len(&self.params) + raw.len());
        write_header(&mut out, ObjectKind::PublicKey, &self.params);
        out.extend_from_slice(raw);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ParseError> {
        let mut r = Reader::new(bytes);
        expect_header(&mut r, ObjectKind::PublicKey)?;
        let params = read_params(&mut r)?;
        let f = params.field().map_err(invalid)?;
        let data = r.symbols(params.r0() * params.n0 * params.p, params.q)?;
        r.finish()?;
        let h = QCMatrix::from_raw(f, params.p, params.r0(), params.n0, data.to_vec())
            .map_err(invalid)?;
        PublicKey::new(params, h).map_err(invalid)
    }
}

impl PrivateKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let params = &self.params;
        let mut out = Vec::new();
        write_header(&mut out, ObjectKind::PrivateKey, params);
        for &b in self.perm.block_perm() {
            out.extend_from_slice(&(b as u16).to_le_bytes());
        }
        for &t in self.perm.shifts() {
            out.extend_from_slice(&(t as u16).to_le_bytes());
        }
        for i in 0..params.k0 {
            let support = self.code.row_support(i);
            out.extend_from_slice(&(support.len() as u32).to_le_bytes());
            for &(pos, _) in support {
                out.extend_from_slice(&(pos as u32).to_le_bytes());
            }
            out.extend(support.iter().map(|&(_, v)| v));
        }
        out.extend_from_slice(self.s.as_raw());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ParseError> {
        let mut r = Reader::new(bytes);
        expect_header(&mut r, ObjectKind::PrivateKey)?;
        let params = read_params(&mut r)?;
        let f = params.field().map_err(invalid)?;
        let (p, n, r0) = (params.p, params.n(), params.r0());
        let block_perm = (0..r0)
            .map(|_| r.u16().map(usize::from))
            .collect::<Result<Vec<_>, _>>()?;
        let shifts = (0..r0)
            .map(|_| r.u16().map(usize::from))
            .collect::<Result<Vec<_>, _>>()?;
        let perm = QCPermutation::new(p, block_perm, shifts).map_err(invalid)?;

        let mut g = QCMatrix::zeros(f, p, params.k0, params.n0);
        for i in 0..params.k0 {
            let count = r.u32()? as usize;
            if count > n {
                return Err(ParseError::Invalid(format!(
                    "generator row support of {count} exceeds n = {n}"
                )));
            }
            let positions = r.take(4 * count)?;
            let values = r.symbols(count, params.q)?;
            let mut prev = None;
            for (chunk, &v) in positions.chunks_exact(4).zip(values) {
                let pos = u32::from_le_bytes(chunk.try_into().unwrap()) as usize;
                if pos >= n || prev.is_some_and(|q| pos <= q) || v == 0 {
                    return Err(ParseError::Invalid(
                        "generator row support is not a sorted nonzero list".into(),
                    ));
                }
                prev = Some(pos);
                g.block_mut(i, pos / p)[pos % p] = v;
            }
        }
        let s_data = r.symbols(params.n0 * params.n0 * p, params.q)?;
        r.finish()?;
        let s = QCMatrix::from_raw(f, p, params.n0, params.n0, s_data.to_vec()).map_err(invalid)?;
        let code = LdgmCode::from_generator(g).map_err(invalid)?;
        PrivateKey::new(params, perm, code, s).map_err(invalid)
    }
}

impl Signature {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out =
            Vec::with_capacity(header_len(&self.params) + 2 + self.theta.len() + self.sigma.len());
        write_header(&mut out, ObjectKind::Signature, &self.params);
        out.extend_from_slice(&(self.theta.len() as u16).to_le_bytes());
        out.extend_from_slice(&self.theta);
        out.extend_from_slice(&self.sigma);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ParseError> {
        let mut r = Reader::new(bytes);
        expect_header(&mut r, ObjectKind::Signature)?;
        let params = read_params(&mut r)?;
        let len = r.u16()? as usize;
        let theta = r.take(len)?.to_vec();
        let sigma = r.symbols(params.n(), params.q)?.to_vec();
        r.finish()?;
        Signature::new(params, theta, sigma).map_err(invalid)
    }
}
