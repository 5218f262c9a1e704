//! The secret QC-LDGM code: a sparse binary generator `G`, its systematic
//! parity-check matrix `H`, and random low-weight codewords `u * G`.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::params::ParameterSet;
use crate::qcalg::{QCMatrix, SparseVector};

/// Generator draws before key generation gives up. Sparse left parts are
/// often singular: about 1 draw in 6 succeeds for `desk`, 1 in 50 for
/// `desk-2x`.
pub const MAX_GENERATOR_ATTEMPTS: u32 = 1000;

/// Draws a `k0 x n0` block generator. Each block row gets `w_g` ones
/// spread uniformly over the `n` positions of its first expanded row, so
/// every expanded row has weight exactly `w_g`.
pub fn sample_generator<R: Rng + ?Sized>(params: &ParameterSet, rng: &mut R) -> Result<QCMatrix> {
    let (p, n) = (params.p, params.n());
    if params.w_g == 0 || params.w_g > n {
        return Err(Error::InvalidParameters(format!(
            "w_g = {} outside [1, {n}]",
            params.w_g
        )));
    }
    let mut g = QCMatrix::zeros(params.field()?, p, params.k0, params.n0);
    for i in 0..params.k0 {
        for pos in index::sample(rng, n, params.w_g) {
            g.block_mut(i, pos / p)[pos % p] = 1;
        }
    }
    Ok(g)
}

/// `H = [-W^T | I]` where `G = M1 [I | W]`. Fails with
/// [`Error::NotReducible`] when the left square part `M1` is singular.
pub fn systematic_parity_check(g: &QCMatrix) -> Result<QCMatrix> {
    let (k0, n0) = (g.rows0(), g.cols0());
    if k0 == 0 || k0 >= n0 {
        return Err(Error::DimensionMismatch(format!(
            "generator of {k0}x{n0} blocks"
        )));
    }
    let m1 = g.sub_blocks(0..k0, 0..k0)?;
    if has_zero_block_line(&m1) {
        return Err(Error::NotReducible);
    }
    let m1_inv = m1.inverse()?.ok_or(Error::NotReducible)?;
    let w = m1_inv.mul(&g.sub_blocks(0..k0, k0..n0)?)?;
    let r0 = n0 - k0;
    w.transpose()
        .neg()
        .hconcat(&QCMatrix::identity(g.field(), g.p(), r0))
}

// Cheap singularity test: an all-zero block row or block column.
fn has_zero_block_line(m: &QCMatrix) -> bool {
    let zero = |b: &[u8]| b.iter().all(|&v| v == 0);
    (0..m.rows0()).any(|i| (0..m.cols0()).all(|j| zero(m.block(i, j))))
        || (0..m.cols0()).any(|j| (0..m.rows0()).all(|i| zero(m.block(i, j))))
}

fn first_row_supports(g: &QCMatrix) -> Vec<Vec<(usize, u8)>> {
    let p = g.p();
    (0..g.rows0())
        .map(|i| {
            (0..g.cols0())
                .flat_map(|j| {
                    g.block(i, j)
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0)
                        .map(move |(c, &v)| (j * p + c, v))
                })
                .collect()
        })
        .collect()
}

/// A generator together with its systematic parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdgmCode {
    g: QCMatrix,
    h: QCMatrix,
    // Support of the first expanded row of each block row of G.
    row_supports: Vec<Vec<(usize, u8)>>,
}

impl LdgmCode {
    pub fn from_generator(g: QCMatrix) -> Result<Self> {
        let h = systematic_parity_check(&g)?;
        let row_supports = first_row_supports(&g);
        Ok(Self { g, h, row_supports })
    }

    /// Samples generators until one is reducible, at most
    /// [`MAX_GENERATOR_ATTEMPTS`] times.
    pub fn generate<R: Rng + ?Sized>(params: &ParameterSet, rng: &mut R) -> Result<Self> {
        for _ in 0..MAX_GENERATOR_ATTEMPTS {
            match Self::from_generator(sample_generator(params, rng)?) {
                Err(Error::NotReducible) => continue,
                other => return other,
            }
        }
        Err(Error::KeygenFailed(format!(
            "no generator with invertible left part in {MAX_GENERATOR_ATTEMPTS} draws"
        )))
    }

    pub fn g(&self) -> &QCMatrix {
        &self.g
    }

    pub fn h(&self) -> &QCMatrix {
        &self.h
    }

    pub fn field(&self) -> Field {
        self.g.field()
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    /// Nonzero entries of the first expanded row of block row `i`.
    pub fn row_support(&self, i: usize) -> &[(usize, u8)] {
        &self.row_supports[i]
    }

    /// `u * G` for a sparse message `u` of length `k`.
    pub fn encode(&self, u: &SparseVector) -> Result<SparseVector> {
        if u.len() != self.k() {
            return Err(Error::DimensionMismatch(format!(
                "message of length {} for k = {}",
                u.len(),
                self.k()
            )));
        }
        let (f, p) = (self.field(), self.g.p());
        let mut terms: Vec<(usize, u8)> = Vec::new();
        for &(idx, coef) in u.entries() {
            let (b, o) = (idx / p, idx % p);
            terms.extend(self.row_supports[b].iter().map(|&(pos, v)| {
                let (j, c) = (pos / p, pos % p);
                (j * p + (c + o) % p, f.mul(coef, v))
            }));
        }
        terms.sort_unstable_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, u8)> = Vec::with_capacity(terms.len());
        for (i, v) in terms {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 = f.add(last.1, v),
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|&(_, v)| v != 0);
        SparseVector::new(self.n(), entries)
    }

    /// `c = u * G` for a uniformly random binary `u` of weight exactly `m_g`.
    pub fn random_codeword<R: Rng + ?Sized>(
        &self,
        m_g: usize,
        rng: &mut R,
    ) -> Result<SparseVector> {
        if m_g > self.k() {
            return Err(Error::InvalidParameters(format!(
                "m_g = {m_g} exceeds k = {}",
                self.k()
            )));
        }
        let rows: Vec<usize> = index::sample(rng, self.k(), m_g).into_vec();
        self.encode(&SparseVector::from_support(self.k(), &rows)?)
    }
}
