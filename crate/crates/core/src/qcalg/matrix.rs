use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;

use super::dense::DenseMatrix;
use super::poly::{self, CirculantPoly};
use super::sparse::SparseVector;

/// A `rows0 x cols0` grid of `p x p` circulant blocks, each stored as the
/// first row of its circulant. Null blocks are all-zero polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct QCMatrix {
    field: Field,
    p: usize,
    rows0: usize,
    cols0: usize,
    data: Vec<u8>,
}

impl fmt::Debug for QCMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QCMatrix({}x{} blocks, p={}, q={})",
            self.rows0,
            self.cols0,
            self.p,
            self.field.q()
        )
    }
}

impl QCMatrix {
    pub fn zeros(field: Field, p: usize, rows0: usize, cols0: usize) -> Self {
        Self {
            field,
            p,
            rows0,
            cols0,
            data: vec![0; rows0 * cols0 * p],
        }
    }

    pub fn identity(field: Field, p: usize, n0: usize) -> Self {
        let mut m = Self::zeros(field, p, n0, n0);
        for i in 0..n0 {
            m.block_mut(i, i)[0] = 1;
        }
        m
    }

    /// Builds a matrix from blocks listed in row-major order.
    pub fn from_blocks(
        field: Field,
        p: usize,
        rows0: usize,
        cols0: usize,
        blocks: &[CirculantPoly],
    ) -> Result<Self> {
        if blocks.len() != rows0 * cols0 {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks for a {rows0}x{cols0} grid",
                blocks.len()
            )));
        }
        let mut m = Self::zeros(field, p, rows0, cols0);
        for (k, b) in blocks.iter().enumerate() {
            if b.p() != p || b.field() != field {
                return Err(Error::DimensionMismatch(format!(
                    "block {k} has p={}, q={}",
                    b.p(),
                    b.field().q()
                )));
            }
            m.data[k * p..(k + 1) * p].copy_from_slice(b.coeffs());
        }
        Ok(m)
    }

    /// Wraps raw block-major data (`rows0 * cols0 * p` residues).
    pub fn from_raw(
        field: Field,
        p: usize,
        rows0: usize,
        cols0: usize,
        data: Vec<u8>,
    ) -> Result<Self> {
        if data.len() != rows0 * cols0 * p {
            return Err(Error::DimensionMismatch(format!(
                "{} symbols for {rows0}x{cols0} blocks of size {p}",
                data.len()
            )));
        }
        if let Some(&v) = data.iter().find(|&&v| v >= field.q()) {
            return Err(Error::NonCanonical {
                value: v,
                q: field.q(),
            });
        }
        Ok(Self {
            field,
            p,
            rows0,
            cols0,
            data,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rows0(&self) -> usize {
        self.rows0
    }

    pub fn cols0(&self) -> usize {
        self.cols0
    }

    /// Expanded row count.
    pub fn rows(&self) -> usize {
        self.rows0 * self.p
    }

    /// Expanded column count.
    pub fn cols(&self) -> usize {
        self.cols0 * self.p
    }

    /// Block-major storage, one circulant first row after another.
    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn block(&self, i: usize, j: usize) -> &[u8] {
        let o = (i * self.cols0 + j) * self.p;
        &self.data[o..o + self.p]
    }

    #[inline]
    pub fn block_mut(&mut self, i: usize, j: usize) -> &mut [u8] {
        let o = (i * self.cols0 + j) * self.p;
        &mut self.data[o..o + self.p]
    }

    pub fn poly(&self, i: usize, j: usize) -> CirculantPoly {
        CirculantPoly::from_raw(self.field, self.block(i, j).to_vec())
    }

    pub fn set_poly(&mut self, i: usize, j: usize, a: &CirculantPoly) -> Result<()> {
        if a.p() != self.p || a.field() != self.field {
            return Err(Error::DimensionMismatch(
                "block does not match matrix ring".into(),
            ));
        }
        self.block_mut(i, j).copy_from_slice(a.coeffs());
        Ok(())
    }

    /// Expanded entry at `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> u8 {
        let p = self.p;
        self.block(r / p, c / p)[(c % p + p - r % p) % p]
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch {
                left: self.field.q(),
                right: other.field.q(),
            });
        }
        if self.p != other.p {
            return Err(Error::DimensionMismatch(format!(
                "circulant sizes {} and {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    /// Full `rows0*p x cols0*p` matrix; row `r` of each block is its first
    /// row cyclically shifted right `r` times.
    pub fn expand(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.field, self.rows(), self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                d.set(r, c, self.get(r, c));
            }
        }
        d
    }

    /// Folds a dense matrix back into QC form, `None` if some block is not
    /// circulant.
    pub fn fold(d: &DenseMatrix, p: usize) -> Option<Self> {
        if p == 0 || !d.rows().is_multiple_of(p) || !d.cols().is_multiple_of(p) {
            return None;
        }
        let mut m = Self::zeros(d.field(), p, d.rows() / p, d.cols() / p);
        for i in 0..m.rows0 {
            for j in 0..m.cols0 {
                let first: Vec<u8> = (0..p).map(|c| d.get(i * p, j * p + c)).collect();
                m.block_mut(i, j).copy_from_slice(&first);
            }
        }
        (0..d.rows())
            .all(|r| (0..d.cols()).all(|c| d.get(r, c) == m.get(r, c)))
            .then_some(m)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.p, self.cols0, self.rows0);
        for i in 0..self.rows0 {
            for j in 0..self.cols0 {
                let b = poly::transpose_raw(self.block(i, j));
                t.block_mut(j, i).copy_from_slice(&b);
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v = f.neg(*v));
        m
    }

    /// Sub-grid of blocks `rows x cols`.
    pub fn sub_blocks(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Result<Self> {
        if rows.end > self.rows0 || cols.end > self.cols0 {
            return Err(Error::DimensionMismatch("block range out of bounds".into()));
        }
        let mut m = Self::zeros(self.field, self.p, rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m.block_mut(a, b).copy_from_slice(self.block(i, j));
            }
        }
        Ok(m)
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        if self.rows0 != other.rows0 {
            return Err(Error::DimensionMismatch(
                "hconcat of different block-row counts".into(),
            ));
        }
        let mut m = Self::zeros(self.field, self.p, self.rows0, self.cols0 + other.cols0);
        for i in 0..self.rows0 {
            for j in 0..self.cols0 {
                m.block_mut(i, j).copy_from_slice(self.block(i, j));
            }
            for j in 0..other.cols0 {
                m.block_mut(i, self.cols0 + j)
                    .copy_from_slice(other.block(i, j));
            }
        }
        Ok(m)
    }

    /// Block product: `C[i][j] = sum_k A[i][k] * B[k][j]` in the ring.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        if self.cols0 != other.rows0 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} blocks times {}x{} blocks",
                self.rows0, self.cols0, other.rows0, other.cols0
            )));
        }
        let (f, p) = (self.field, self.p);
        let chunk = poly::convs_per_reduction(f, p);
        let mut out = Self::zeros(f, p, self.rows0, other.cols0);
        let mut acc = vec![0u32; other.cols0 * p];
        for i in 0..self.rows0 {
            acc.iter_mut().for_each(|v| *v = 0);
            let mut pending = 0;
            for k in 0..self.cols0 {
                let a = self.block(i, k);
                if a.iter().all(|&v| v == 0) {
                    continue;
                }
                if pending == chunk {
                    acc.iter_mut().for_each(|v| *v %= f.q() as u32);
                    pending = 0;
                }
                for j in 0..other.cols0 {
                    poly::conv_acc(&mut acc[j * p..(j + 1) * p], a, other.block(k, j));
                }
                pending += 1;
            }
            for j in 0..other.cols0 {
                let dst = out.block_mut(i, j);
                for (d, &s) in dst.iter_mut().zip(&acc[j * p..(j + 1) * p]) {
                    *d = f.reduce(s);
                }
            }
        }
        Ok(out)
    }

    /// `v * A` for a sparse row vector of length `rows0 * p`. Costs
    /// `O(weight(v) * cols0 * p)`.
    pub fn sparse_vec_mul(&self, v: &SparseVector) -> Result<Vec<u8>> {
        if v.len() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times matrix with {} rows",
                v.len(),
                self.rows()
            )));
        }
        let p = self.p;
        let mut acc = vec![0u32; self.cols()];
        let budget = self.accumulation_budget();
        for (n, &(idx, val)) in v.entries().iter().enumerate() {
            if n > 0 && n % budget == 0 {
                self.reduce_acc(&mut acc);
            }
            let (bi, o) = (idx / p, idx % p);
            let val = val as u32;
            for j in 0..self.cols0 {
                let a = self.block(bi, j);
                let out = &mut acc[j * p..(j + 1) * p];
                // Row o of the circulant is `a` rotated right by o.
                let (head, tail) = out.split_at_mut(o);
                for (s, &x) in tail.iter_mut().zip(&a[..p - o]) {
                    *s += val * x as u32;
                }
                for (s, &x) in head.iter_mut().zip(&a[p - o..]) {
                    *s += val * x as u32;
                }
            }
        }
        Ok(acc.into_iter().map(|s| self.field.reduce(s)).collect())
    }

    /// `v * A` for a dense row vector.
    pub fn vec_mul(&self, v: &[u8]) -> Result<Vec<u8>> {
        self.sparse_vec_mul(&SparseVector::from_dense(v))
    }

    /// `A * v^T` for a sparse column vector of length `cols0 * p`.
    pub fn mul_sparse_vec(&self, v: &SparseVector) -> Result<Vec<u8>> {
        if v.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix with {} columns times vector of length {}",
                self.cols(),
                v.len()
            )));
        }
        let p = self.p;
        let mut acc = vec![0u32; self.rows()];
        let budget = self.accumulation_budget();
        for (n, &(idx, val)) in v.entries().iter().enumerate() {
            if n > 0 && n % budget == 0 {
                self.reduce_acc(&mut acc);
            }
            let (bj, o) = (idx / p, idx % p);
            let val = val as u32;
            for i in 0..self.rows0 {
                let a = self.block(i, bj);
                let out = &mut acc[i * p..(i + 1) * p];
                // Column o of the circulant, read top to bottom, is
                // a[o], a[o-1], ..., a[0], a[p-1], ..., a[o+1].
                let (head, tail) = out.split_at_mut(o + 1);
                for (s, &x) in head.iter_mut().zip(a[..=o].iter().rev()) {
                    *s += val * x as u32;
                }
                for (s, &x) in tail.iter_mut().zip(a[o + 1..].iter().rev()) {
                    *s += val * x as u32;
                }
            }
        }
        Ok(acc.into_iter().map(|s| self.field.reduce(s)).collect())
    }

    /// `A * v^T` for a dense column vector.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        self.mul_sparse_vec(&SparseVector::from_dense(v))
    }

    fn accumulation_budget(&self) -> usize {
        let q = self.field.q() as u64;
        (((u32::MAX as u64 - q) / ((q - 1) * (q - 1))) as usize).max(1)
    }

    fn reduce_acc(&self, acc: &mut [u32]) {
        let q = self.field.q() as u32;
        acc.iter_mut().for_each(|v| *v %= q);
    }

    /// Inverse of a square QC matrix, `None` if singular.
    ///
    /// Block Gauss-Jordan over the ring with unit pivots. A column with no
    /// unit candidate gets random F_q combinations of its candidate rows
    /// folded into the pivot row. If that also fails the expanded matrix
    /// is inverted densely and folded back.
    pub fn inverse(&self) -> Result<Option<Self>> {
        if self.rows0 != self.cols0 {
            return Err(Error::DimensionMismatch(format!(
                "cannot invert a {}x{} block matrix",
                self.rows0, self.cols0
            )));
        }
        match RingElimination::new(self).run() {
            Elimination::Inverse(m) => Ok(Some(m)),
            Elimination::Singular => Ok(None),
            Elimination::NeedsDense => Ok(self.dense_inverse()),
        }
    }

    /// Inverse via dense elimination on the expansion.
    pub fn dense_inverse(&self) -> Option<Self> {
        let inv = self.expand().inverse()?;
        Some(Self::fold(&inv, self.p).expect("inverse of a quasi-cyclic matrix is quasi-cyclic"))
    }
}

enum Elimination {
    Inverse(QCMatrix),
    Singular,
    NeedsDense,
}

struct RingElimination {
    a: QCMatrix,
    inv: QCMatrix,
    acc: Vec<u32>,
}

const COMBINATION_TRIES: u32 = 8;

impl RingElimination {
    fn new(m: &QCMatrix) -> Self {
        Self {
            a: m.clone(),
            inv: QCMatrix::identity(m.field, m.p, m.rows0),
            acc: vec![0; m.p],
        }
    }

    fn run(mut self) -> Elimination {
        let n0 = self.a.rows0;
        let f = self.a.field;
        for k in 0..n0 {
            let candidates: Vec<usize> = (k..n0)
                .filter(|&r| self.a.block(r, k).iter().any(|&v| v != 0))
                .collect();
            if candidates.is_empty() {
                return Elimination::Singular;
            }
            let unit = candidates
                .iter()
                .find_map(|&r| poly::inv_raw(f, self.a.block(r, k)).map(|i| (r, i)));
            let (piv, piv_inv) = match unit {
                Some(found) => found,
                None => match self.combine_pivot(k, &candidates) {
                    Some(i) => (k, i),
                    None => return Elimination::NeedsDense,
                },
            };
            self.swap_rows(k, piv);
            self.scale_row(k, &piv_inv);
            for r in 0..n0 {
                if r == k {
                    continue;
                }
                let factor = self.a.block(r, k).to_vec();
                if factor.iter().all(|&v| v == 0) {
                    continue;
                }
                self.sub_multiple(r, k, &factor);
            }
        }
        Elimination::Inverse(self.inv)
    }

    // Adds F_q multiples of candidate rows into row k until block (k,k) is a
    // unit. Row k itself may be any candidate, so first swap one in.
    fn combine_pivot(&mut self, k: usize, candidates: &[usize]) -> Option<Vec<u8>> {
        let f = self.a.field;
        let q = f.q() as u32;
        self.swap_rows(k, candidates[0]);
        let others: Vec<usize> = (k + 1..self.a.rows0)
            .filter(|&r| self.a.block(r, k).iter().any(|&v| v != 0))
            .collect();
        if others.is_empty() {
            return None;
        }
        for t in 1..=COMBINATION_TRIES {
            for (n, &r) in others.iter().enumerate() {
                let lambda = ((t * 31 + n as u32 * 17 + 1) % (q - 1) + 1) as u8;
                let mut scalar = vec![0u8; self.a.p];
                scalar[0] = f.neg(lambda);
                // row_k -= (-lambda) * row_r, i.e. row_k += lambda * row_r
                self.sub_multiple_from(k, r, &scalar);
            }
            if let Some(i) = poly::inv_raw(f, self.a.block(k, k)) {
                return Some(i);
            }
        }
        None
    }

    fn swap_rows(&mut self, x: usize, y: usize) {
        if x == y {
            return;
        }
        for m in [&mut self.a, &mut self.inv] {
            let w = m.cols0 * m.p;
            let (lo, hi) = (x.min(y), x.max(y));
            let (head, tail) = m.data.split_at_mut(hi * w);
            head[lo * w..(lo + 1) * w].swap_with_slice(&mut tail[..w]);
        }
    }

    fn scale_row(&mut self, r: usize, s: &[u8]) {
        let f = self.a.field;
        let p = self.a.p;
        for m in [&mut self.a, &mut self.inv] {
            for j in 0..m.cols0 {
                let b = m.block_mut(r, j);
                if b.iter().all(|&v| v == 0) {
                    continue;
                }
                self.acc.iter_mut().for_each(|v| *v = 0);
                poly::conv_acc(&mut self.acc, s, b);
                for (d, &v) in b.iter_mut().zip(&self.acc[..p]) {
                    *d = f.reduce(v);
                }
            }
        }
    }

    // row[dst] -= factor * row[k]; used for elimination where a[k][k] == 1.
    fn sub_multiple(&mut self, dst: usize, k: usize, factor: &[u8]) {
        self.sub_multiple_from(dst, k, factor);
    }

    fn sub_multiple_from(&mut self, dst: usize, src: usize, factor: &[u8]) {
        let f = self.a.field;
        let p = self.a.p;
        for m in [&mut self.a, &mut self.inv] {
            for j in 0..m.cols0 {
                let s = m.block(src, j);
                if s.iter().all(|&v| v == 0) {
                    continue;
                }
                self.acc.iter_mut().for_each(|v| *v = 0);
                poly::conv_acc(&mut self.acc, factor, s);
                let d = m.block_mut(dst, j);
                for (x, &v) in d.iter_mut().zip(&self.acc[..p]) {
                    *x = f.sub(*x, f.reduce(v));
                }
            }
        }
    }
}
