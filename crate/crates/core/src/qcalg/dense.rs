use crate::error::{Error, Result};
use crate::field::Field;

/// Row-major dense matrix over F_q. Used as the fallback path of QC
/// inversion and for expansions of QC objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl DenseMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            if let Some(&v) = r.iter().find(|&&v| v >= field.q()) {
                return Err(Error::NonCanonical {
                    value: v,
                    q: field.q(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!(v < self.field.q());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (s, &b) in acc.iter_mut().zip(other.row(k)) {
                    *s += a as u64 * b as u64;
                }
            }
            for (c, &s) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = (s % f.q() as u64) as u8;
            }
        }
        Ok(out)
    }

    /// `M * v^T` for a dense column vector.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let q = self.field.q() as u64;
        Ok((0..self.rows)
            .map(|r| {
                let s: u64 = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum();
                (s % q) as u8
            })
            .collect())
    }

    /// Reduces a copy to row echelon form and returns the rank.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(None)
    }

    /// Gauss-Jordan inverse, `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let mut m = self.clone();
        let mut inv = Self::identity(self.field, self.rows);
        (m.eliminate(Some(&mut inv)) == self.rows).then_some(inv)
    }

    // Gauss-Jordan elimination; row operations are mirrored on `aug`.
    fn eliminate(&mut self, mut aug: Option<&mut Self>) -> usize {
        let f = self.field;
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(piv) = (rank..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(piv, rank);
            if let Some(a) = aug.as_deref_mut() {
                a.swap_rows(piv, rank);
            }
            let inv = f.inv(self.get(rank, col)).expect("nonzero pivot");
            self.scale_row(rank, inv);
            if let Some(a) = aug.as_deref_mut() {
                a.scale_row(rank, inv);
            }
            for r in 0..self.rows {
                let factor = self.get(r, col);
                if r == rank || factor == 0 {
                    continue;
                }
                self.axpy_row(r, rank, f.neg(factor));
                if let Some(a) = aug.as_deref_mut() {
                    a.axpy_row(r, rank, f.neg(factor));
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * c);
        head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
    }

    fn scale_row(&mut self, r: usize, s: u8) {
        let f = self.field;
        let c = self.cols;
        for v in &mut self.data[r * c..(r + 1) * c] {
            *v = f.mul(*v, s);
        }
    }

    // row[dst] += s * row[src]
    fn axpy_row(&mut self, dst: usize, src: usize, s: u8) {
        let f = self.field;
        let c = self.cols;
        for k in 0..c {
            let v = self.data[src * c + k];
            if v != 0 {
                let d = &mut self.data[dst * c + k];
                *d = f.add(*d, f.mul(s, v));
            }
        }
    }
}
