use serde::Serialize;

use crate::error::Result;
use crate::scheme::{encoded_header_len, THETA_LEN};

use super::attack::log2_binomial;
use super::CodeDims;

/// Key and signature sizes plus the signature and codeword counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SizeReport {
    /// `r n / p`: one circulant row per block of `H'`. Fractional when `n`
    /// or `r` is not a multiple of `p`.
    pub pk_symbols: f64,
    pub symbol_bits: u32,
    pub pk_packed_bytes: f64,
    /// In units of 1024 bytes.
    pub pk_packed_kib: f64,
    /// One byte per symbol plus the header; `None` for fractional counts.
    pub pk_disk_bytes: Option<u64>,
    /// Header, `Theta` and one byte per entry of `sigma`.
    pub sig_disk_bytes: u64,
    /// `log2 C(r, w)`: distinct syndromes, hence signatures.
    pub log2_ns: f64,
    /// `log2 C(k, m_g)`: distinct codewords `u * G`.
    pub log2_nc: f64,
}

/// Sizes for a code with `density_terms` nonzero coefficients in `d(x)`.
pub fn size_report(dims: &CodeDims, density_terms: usize) -> Result<SizeReport> {
    let bits = (dims.q as f64).log2().ceil() as u32;
    let pk_symbols = dims.r() as f64 * dims.n as f64 / dims.p as f64;
    let pk_packed_bytes = pk_symbols * bits as f64 / 8.0;
    let header = encoded_header_len(density_terms) as u64;
    let whole = dims.n.is_multiple_of(dims.p) && dims.r().is_multiple_of(dims.p);
    Ok(SizeReport {
        pk_symbols,
        symbol_bits: bits,
        pk_packed_bytes,
        pk_packed_kib: pk_packed_bytes / 1024.0,
        pk_disk_bytes: whole.then(|| header + (dims.r() / dims.p * dims.n) as u64),
        sig_disk_bytes: header + 2 + THETA_LEN as u64 + dims.n as u64,
        log2_ns: log2_binomial(dims.r() as u64, dims.w as u64)?,
        log2_nc: log2_binomial(dims.k as u64, dims.m_g as u64)?,
    })
}
