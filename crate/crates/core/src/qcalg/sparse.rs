use crate::error::{Error, Result};
use crate::field::Field;

/// A vector stored as its support: strictly increasing indices paired with
/// nonzero residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVector {
    len: usize,
    entries: Vec<(usize, u8)>,
}

impl SparseVector {
    pub fn new(len: usize, entries: Vec<(usize, u8)>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::DimensionMismatch(
                    "support indices must be strictly increasing".into(),
                ));
            }
        }
        if let Some(&(i, _)) = entries.last() {
            if i >= len {
                return Err(Error::DimensionMismatch(format!(
                    "index {i} out of range for length {len}"
                )));
            }
        }
        if entries.iter().any(|&(_, v)| v == 0) {
            return Err(Error::DimensionMismatch(
                "explicit zero stored in sparse vector".into(),
            ));
        }
        Ok(Self { len, entries })
    }

    pub fn zero(len: usize) -> Self {
        Self {
            len,
            entries: Vec::new(),
        }
    }

    /// Binary vector with ones at `indices` (any order, no duplicates).
    pub fn from_support(len: usize, indices: &[usize]) -> Result<Self> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        Self::new(len, idx.into_iter().map(|i| (i, 1)).collect())
    }

    pub fn from_dense(v: &[u8]) -> Self {
        let entries = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (i, x))
            .collect();
        Self {
            len: v.len(),
            entries,
        }
    }

    pub fn to_dense(&self) -> Vec<u8> {
        let mut v = vec![0; self.len];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, u8)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn get(&self, i: usize) -> u8 {
        self.entries
            .binary_search_by_key(&i, |&(j, _)| j)
            .map_or(0, |k| self.entries[k].1)
    }

    /// Coordinate-wise sum over F_q; cancellations drop out of the support.
    pub fn add(&self, other: &Self, field: Field) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "lengths {} and {}",
                self.len, other.len
            )));
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i]);
                i += 1;
            } else if take_b {
                out.push(b[j]);
                j += 1;
            } else {
                let s = field.add(a[i].1, b[j].1);
                if s != 0 {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        Ok(Self {
            len: self.len,
            entries: out,
        })
    }

    /// Places this vector at offset `at` inside a zero vector of length `len`.
    pub fn embed(&self, len: usize, at: usize) -> Result<Self> {
        if at + self.len > len {
            return Err(Error::DimensionMismatch(
                "embedding overflows target".into(),
            ));
        }
        Ok(Self {
            len,
            entries: self.entries.iter().map(|&(i, v)| (i + at, v)).collect(),
        })
    }
}
