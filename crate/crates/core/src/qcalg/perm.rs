use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;

use super::dense::DenseMatrix;
use super::matrix::QCMatrix;
use super::sparse::SparseVector;

/// A permutation in quasi-cyclic form: block `(i, perm[i])` is the
/// circulant shift `x^shifts[i]`, every other block is null.
///
/// As a map on indices (row-vector action `s -> s * P`), position
/// `(b, o)` goes to `(perm[b], o + shifts[b] mod p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QCPermutation {
    p: usize,
    block_perm: Vec<usize>,
    shifts: Vec<usize>,
}

impl QCPermutation {
    pub fn new(p: usize, block_perm: Vec<usize>, shifts: Vec<usize>) -> Result<Self> {
        let m = block_perm.len();
        if p == 0 || shifts.len() != m {
            return Err(Error::DimensionMismatch(
                "permutation and shift lists differ in length".into(),
            ));
        }
        let mut seen = vec![false; m];
        for &b in &block_perm {
            if b >= m || std::mem::replace(&mut seen[b], true) {
                return Err(Error::InvalidParameters(
                    "block permutation is not a bijection".into(),
                ));
            }
        }
        if shifts.iter().any(|&t| t >= p) {
            return Err(Error::InvalidParameters(format!(
                "shift out of range for p = {p}"
            )));
        }
        Ok(Self {
            p,
            block_perm,
            shifts,
        })
    }

    pub fn identity(p: usize, blocks: usize) -> Self {
        Self {
            p,
            block_perm: (0..blocks).collect(),
            shifts: vec![0; blocks],
        }
    }

    /// Uniform block permutation with uniform shifts.
    pub fn random<R: Rng + ?Sized>(p: usize, blocks: usize, rng: &mut R) -> Self {
        let mut block_perm: Vec<usize> = (0..blocks).collect();
        block_perm.shuffle(rng);
        let shifts = (0..blocks).map(|_| rng.random_range(0..p)).collect();
        Self {
            p,
            block_perm,
            shifts,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> usize {
        self.block_perm.len()
    }

    /// Expanded size.
    pub fn dim(&self) -> usize {
        self.p * self.block_perm.len()
    }

    pub fn block_perm(&self) -> &[usize] {
        &self.block_perm
    }

    pub fn shifts(&self) -> &[usize] {
        &self.shifts
    }

    #[inline]
    pub fn map_index(&self, j: usize) -> usize {
        let (b, o) = (j / self.p, j % self.p);
        self.block_perm[b] * self.p + (o + self.shifts[b]) % self.p
    }

    pub fn inverse(&self) -> Self {
        let m = self.blocks();
        let mut block_perm = vec![0; m];
        let mut shifts = vec![0; m];
        for (i, (&b, &t)) in self.block_perm.iter().zip(&self.shifts).enumerate() {
            block_perm[b] = i;
            shifts[b] = (self.p - t) % self.p;
        }
        Self {
            p: self.p,
            block_perm,
            shifts,
        }
    }

    /// `s * P`: moves every support position through the permutation.
    pub fn apply(&self, s: &SparseVector) -> Result<SparseVector> {
        if s.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against permutation of size {}",
                s.len(),
                self.dim()
            )));
        }
        let mut entries: Vec<(usize, u8)> = s
            .entries()
            .iter()
            .map(|&(i, v)| (self.map_index(i), v))
            .collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        SparseVector::new(s.len(), entries)
    }

    pub fn to_qc_matrix(&self, field: Field) -> QCMatrix {
        let m = self.blocks();
        let mut out = QCMatrix::zeros(field, self.p, m, m);
        for (i, (&b, &t)) in self.block_perm.iter().zip(&self.shifts).enumerate() {
            out.block_mut(i, b)[t] = 1;
        }
        out
    }

    pub fn expand(&self, field: Field) -> DenseMatrix {
        self.to_qc_matrix(field).expand()
    }

    /// `P * X`: block row `i` of the result is `x^shifts[i] * X[perm[i]][*]`.
    pub fn permute_rows(&self, x: &QCMatrix) -> Result<QCMatrix> {
        if x.rows0() != self.blocks() || x.p() != self.p {
            return Err(Error::DimensionMismatch(
                "permutation does not match matrix block rows".into(),
            ));
        }
        let p = self.p;
        let mut out = QCMatrix::zeros(x.field(), p, x.rows0(), x.cols0());
        for (i, (&b, &t)) in self.block_perm.iter().zip(&self.shifts).enumerate() {
            for j in 0..x.cols0() {
                let src = x.block(b, j);
                let dst = out.block_mut(i, j);
                for (c, &v) in src.iter().enumerate() {
                    dst[(c + t) % p] = v;
                }
            }
        }
        Ok(out)
    }
}
