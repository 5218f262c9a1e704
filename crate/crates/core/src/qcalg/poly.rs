use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// An element of `F_q[x] / (x^p - 1)`, equivalently a `p x p` circulant
/// matrix whose first row is `coeffs`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CirculantPoly {
    field: Field,
    coeffs: Vec<u8>,
}

impl CirculantPoly {
    pub fn new(field: Field, coeffs: Vec<u8>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionMismatch(
                "circulant size must be at least 1".into(),
            ));
        }
        if let Some(&v) = coeffs.iter().find(|&&v| v >= field.q()) {
            return Err(Error::NonCanonical {
                value: v,
                q: field.q(),
            });
        }
        Ok(Self { field, coeffs })
    }

    pub(crate) fn from_raw(field: Field, coeffs: Vec<u8>) -> Self {
        debug_assert!(coeffs.iter().all(|&v| v < field.q()));
        Self { field, coeffs }
    }

    pub fn zero(field: Field, p: usize) -> Self {
        Self::from_raw(field, vec![0; p])
    }

    pub fn one(field: Field, p: usize) -> Self {
        Self::monomial(field, p, 0)
    }

    /// `x^t`, the circulant shift by `t`.
    pub fn monomial(field: Field, p: usize, t: usize) -> Self {
        let mut c = vec![0; p];
        c[t % p] = 1;
        Self::from_raw(field, c)
    }

    pub fn p(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.field.elem(self.coeffs[i] as u64)
    }

    pub fn into_coeffs(self) -> Vec<u8> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch {
                left: self.field.q(),
                right: other.field.q(),
            });
        }
        if self.p() != other.p() {
            return Err(Error::DimensionMismatch(format!(
                "circulant sizes {} and {}",
                self.p(),
                other.p()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = self.field;
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.add(a, b));
        Ok(Self::from_raw(f, c.collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = self.field;
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.sub(a, b));
        Ok(Self::from_raw(f, c.collect()))
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        Self::from_raw(f, self.coeffs.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn scale(&self, c: u8) -> Self {
        let f = self.field;
        Self::from_raw(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Product modulo `x^p - 1` (cyclic convolution).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut acc = vec![0u32; self.p()];
        conv_acc(&mut acc, &self.coeffs, &other.coeffs);
        let f = self.field;
        Ok(Self::from_raw(
            f,
            acc.into_iter().map(|v| f.reduce(v)).collect(),
        ))
    }

    /// Multiplicative inverse, or `None` when `gcd(a(x), x^p - 1) != 1`.
    pub fn inv(&self) -> Option<Self> {
        inv_raw(self.field, &self.coeffs).map(|c| Self::from_raw(self.field, c))
    }

    /// `a(x^{-1})`, the polynomial of the transposed circulant.
    pub fn transpose(&self) -> Self {
        Self::from_raw(self.field, transpose_raw(&self.coeffs))
    }
}

impl fmt::Debug for CirculantPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CirculantPoly(q={}, {:?})", self.field.q(), self.coeffs)
    }
}

pub(crate) fn transpose_raw(a: &[u8]) -> Vec<u8> {
    let p = a.len();
    (0..p).map(|i| a[(p - i) % p]).collect()
}

/// `acc += a * b mod (x^p - 1)` without reduction. Each call adds at most
/// `p * (q-1)^2` to any slot; callers reduce before `u32` overflow.
#[inline]
pub(crate) fn conv_acc(acc: &mut [u32], a: &[u8], b: &[u8]) {
    let p = a.len();
    debug_assert_eq!(b.len(), p);
    debug_assert_eq!(acc.len(), p);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let ai = ai as u32;
        let (lo, hi) = acc.split_at_mut(i);
        for (s, &bj) in hi.iter_mut().zip(&b[..p - i]) {
            *s += ai * bj as u32;
        }
        for (s, &bj) in lo.iter_mut().zip(&b[p - i..]) {
            *s += ai * bj as u32;
        }
    }
}

/// How many `conv_acc` calls fit between reductions when slots start below q.
pub(crate) fn convs_per_reduction(field: Field, p: usize) -> usize {
    let q = field.q() as u64;
    let per = p as u64 * (q - 1) * (q - 1);
    (((u32::MAX as u64 - q) / per.max(1)) as usize).max(1)
}

// Dense polynomials over F_q, little-endian, trimmed of leading zeros.

fn trim(mut v: Vec<u8>) -> Vec<u8> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_divmod(f: Field, num: &[u8], den: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead_inv = f.inv(den[dd]).expect("trimmed divisor has a nonzero lead");
    if rem.len() < den.len() {
        return (Vec::new(), trim(rem));
    }
    let mut quot = vec![0u8; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = f.mul(rem[k + dd], lead_inv);
        quot[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[k + j] = f.sub(rem[k + j], f.mul(c, d));
            }
        }
    }
    rem.truncate(dd);
    (trim(quot), trim(rem))
}

fn poly_mul_plain(f: Field, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

fn poly_sub_plain(f: Field, a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = f.sub(x, y);
    }
    trim(out)
}

/// Extended Euclid in `F_q[x]` against `x^p - 1`.
pub(crate) fn inv_raw(f: Field, a: &[u8]) -> Option<Vec<u8>> {
    let p = a.len();
    let mut modulus = vec![0u8; p + 1];
    modulus[0] = f.neg(1);
    modulus[p] = 1;

    let (mut r0, mut r1) = (modulus, trim(a.to_vec()));
    let (mut t0, mut t1): (Vec<u8>, Vec<u8>) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (quot, rem) = poly_divmod(f, &r0, &r1);
        let t2 = poly_sub_plain(f, &t0, &poly_mul_plain(f, &quot, &t1));
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.len() != 1 {
        return None;
    }
    let scale = f.inv(r0[0])?;
    let mut out = vec![0u8; p];
    for (i, &c) in t0.iter().enumerate() {
        out[i % p] = f.add(out[i % p], f.mul(c, scale));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalg::test_support::{dense_circulant, dense_mul};
    use proptest::prelude::*;

    fn f127() -> Field {
        Field::new(127).unwrap()
    }

    fn poly(c: &[u8]) -> CirculantPoly {
        CirculantPoly::new(f127(), c.to_vec()).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(
            poly(&[1, 1, 0]).add(&poly(&[0, 0, 0])).unwrap(),
            poly(&[1, 1, 0])
        );
        assert!(poly(&[1, 1, 0])
            .add(&poly(&[126, 126, 0]))
            .unwrap()
            .is_zero());
        assert_eq!(
            poly(&[1, 2, 0]).add(&poly(&[3, 0, 4])).unwrap(),
            poly(&[4, 2, 4])
        );
    }

    #[test]
    fn mul_examples() {
        let a = poly(&[5, 0, 9, 1, 0]);
        assert_eq!(a.mul(&CirculantPoly::one(f127(), 5)).unwrap(), a);
        let x = CirculantPoly::monomial(f127(), 5, 1);
        let x4 = CirculantPoly::monomial(f127(), 5, 4);
        assert_eq!(x.mul(&x4).unwrap(), CirculantPoly::one(f127(), 5));
        // (1+x)(1+x^2) = 1+x+x^2+x^3, and x^3 = 1.
        assert_eq!(
            poly(&[1, 1, 0]).mul(&poly(&[1, 0, 1])).unwrap(),
            poly(&[2, 1, 1])
        );
    }

    #[test]
    fn inv_examples() {
        let one = CirculantPoly::one(f127(), 7);
        assert_eq!(one.inv().unwrap(), one);
        let x = CirculantPoly::monomial(f127(), 5, 1);
        assert_eq!(x.inv().unwrap(), CirculantPoly::monomial(f127(), 5, 4));
        assert!(poly(&[1, 1, 1]).inv().is_none());
        assert!(CirculantPoly::zero(f127(), 4).inv().is_none());
    }

    #[test]
    fn all_ones_has_no_inverse_by_exhaustion() {
        // Search the whole ring F_7[x]/(x^3-1) for an inverse of 1+x+x^2.
        let f = Field::new(7).unwrap();
        let a = CirculantPoly::new(f, vec![1, 1, 1]).unwrap();
        let one = CirculantPoly::one(f, 3);
        let mut found = false;
        for v in 0..343u32 {
            let b = CirculantPoly::new(f, vec![(v % 7) as u8, (v / 7 % 7) as u8, (v / 49) as u8])
                .unwrap();
            found |= a.mul(&b).unwrap() == one;
        }
        assert!(!found);
        assert!(a.inv().is_none());
    }

    #[test]
    fn inverse_existence_matches_exhaustive_search() {
        let f = Field::new(5).unwrap();
        let one = CirculantPoly::one(f, 3);
        let all: Vec<_> = (0..125u32)
            .map(|v| {
                CirculantPoly::new(f, vec![(v % 5) as u8, (v / 5 % 5) as u8, (v / 25) as u8])
                    .unwrap()
            })
            .collect();
        for a in &all {
            let brute = all.iter().find(|b| a.mul(b).unwrap() == one);
            match (a.inv(), brute) {
                (Some(inv), Some(b)) => assert_eq!(&inv, b),
                (None, None) => {}
                (got, want) => panic!("{a:?}: inv={got:?} brute={want:?}"),
            }
        }
    }

    #[test]
    fn mismatches() {
        let a = poly(&[1, 2, 3]);
        let b = poly(&[1, 2]);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
        let c = CirculantPoly::new(Field::new(5).unwrap(), vec![1, 2, 3]).unwrap();
        assert!(matches!(a.add(&c), Err(Error::ModulusMismatch { .. })));
        assert!(CirculantPoly::new(f127(), vec![127]).is_err());
    }

    #[test]
    fn transpose_matches_dense_transpose() {
        let a = poly(&[3, 1, 4, 1, 5][..3]);
        let d = dense_circulant(a.coeffs());
        let t = dense_circulant(a.transpose().coeffs());
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(d[r][c], t[c][r]);
            }
        }
    }

    fn arb_poly(p: usize) -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..127, p)
    }

    proptest! {
        #[test]
        fn ring_isomorphism(p in prop::sample::select(vec![3usize, 5, 13]), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<u8> = (0..p).map(|_| rng.random_range(0..127)).collect();
            let b: Vec<u8> = (0..p).map(|_| rng.random_range(0..127)).collect();
            let prod = poly(&a).mul(&poly(&b)).unwrap();
            let dense = dense_mul(&dense_circulant(&a), &dense_circulant(&b), 127);
            prop_assert_eq!(dense_circulant(prod.coeffs()), dense);
        }

        #[test]
        fn inverse_round_trip(a in arb_poly(13)) {
            let a = poly(&a);
            if let Some(b) = a.inv() {
                prop_assert_eq!(a.mul(&b).unwrap(), CirculantPoly::one(f127(), 13));
            }
        }
    }
}
