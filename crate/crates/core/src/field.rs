//! Arithmetic in the prime field F_q for odd primes 3 <= q <= 255.
//!
//! Residues are kept canonical (`0 <= value < q`) after every operation.
//! Nothing here is constant-time: the scheme is a one-time research
//! construction and side-channel hardening is out of scope.

use std::fmt;

use crate::error::{Error, Result};

/// Prime-field parameters. Cheap to copy; the modulus is a runtime value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    q: u8,
}

fn is_prime(n: u16) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u16;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds the field of order `q`. `q` must be an odd prime below 256.
    pub fn new(q: u16) -> Result<Self> {
        if !(3..=255).contains(&q) || !is_prime(q) {
            return Err(Error::InvalidModulus(q));
        }
        Ok(Self { q: q as u8 })
    }

    #[inline]
    pub fn q(self) -> u8 {
        self.q
    }

    /// Bits needed to write one symbol, `ceil(log2 q)`.
    pub fn symbol_bits(self) -> u32 {
        u8::BITS - (self.q - 1).leading_zeros()
    }

    /// Reduces an arbitrary integer into the field.
    pub fn elem(self, v: u64) -> FieldElement {
        FieldElement {
            value: (v % self.q as u64) as u8,
            q: self.q,
        }
    }

    /// Wraps an already-canonical residue, rejecting `v >= q`.
    pub fn try_elem(self, v: u8) -> Result<FieldElement> {
        if v >= self.q {
            return Err(Error::NonCanonical {
                value: v,
                q: self.q,
            });
        }
        Ok(FieldElement {
            value: v,
            q: self.q,
        })
    }

    pub fn zero(self) -> FieldElement {
        FieldElement {
            value: 0,
            q: self.q,
        }
    }

    pub fn one(self) -> FieldElement {
        FieldElement {
            value: 1,
            q: self.q,
        }
    }

    // Raw-residue kernels used by the polynomial and matrix layers. Inputs
    // must already be canonical.

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a as u16 + b as u16;
        let q = self.q as u16;
        (if s >= q { s - q } else { s }) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        if a >= b {
            a - b
        } else {
            (a as u16 + self.q as u16 - b as u16) as u8
        }
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.q as u16) as u8
    }

    #[inline]
    pub fn reduce(self, v: u32) -> u8 {
        (v % self.q as u32) as u8
    }

    /// Inverse by Fermat, `a^(q-2)`. `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        if a == 0 {
            return None;
        }
        let mut base = a;
        let mut exp = self.q - 2;
        let mut acc = 1u8;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        Some(acc)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// A canonical residue tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u8,
    q: u8,
}

// Checked operations: mixing moduli is an error, so these return `Result`
// rather than implementing the operator traits.
#[allow(clippy::should_implement_trait)]
impl FieldElement {
    #[inline]
    pub fn value(self) -> u8 {
        self.value
    }

    pub fn field(self) -> Field {
        Field { q: self.q }
    }

    fn check(self, other: Self) -> Result<Field> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch {
                left: self.q,
                right: other.q,
            });
        }
        Ok(self.field())
    }

    pub fn add(self, rhs: Self) -> Result<Self> {
        let f = self.check(rhs)?;
        Ok(Self {
            value: f.add(self.value, rhs.value),
            q: self.q,
        })
    }

    pub fn sub(self, rhs: Self) -> Result<Self> {
        let f = self.check(rhs)?;
        Ok(Self {
            value: f.sub(self.value, rhs.value),
            q: self.q,
        })
    }

    pub fn mul(self, rhs: Self) -> Result<Self> {
        let f = self.check(rhs)?;
        Ok(Self {
            value: f.mul(self.value, rhs.value),
            q: self.q,
        })
    }

    pub fn neg(self) -> Self {
        Self {
            value: self.field().neg(self.value),
            q: self.q,
        }
    }

    pub fn inv(self) -> Result<Self> {
        let value = self.field().inv(self.value).ok_or(Error::DivisionByZero)?;
        Ok(Self { value, q: self.q })
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f127() -> Field {
        Field::new(127).unwrap()
    }

    fn e(v: u8) -> FieldElement {
        f127().try_elem(v).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        for q in [0, 1, 2, 4, 9, 15, 121, 256, 257, 1000] {
            assert!(Field::new(q).is_err(), "q={q}");
        }
        for q in [3, 5, 7, 13, 127, 251] {
            assert!(Field::new(q).is_ok(), "q={q}");
        }
    }

    #[test]
    fn add_examples() {
        assert_eq!(e(126).add(e(1)).unwrap().value(), 0);
        assert_eq!(e(0).add(e(5)).unwrap().value(), 5);
        assert_eq!(e(100).add(e(100)).unwrap().value(), 73);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(e(1).mul(e(77)).unwrap().value(), 77);
        assert_eq!(e(0).mul(e(77)).unwrap().value(), 0);
        assert_eq!(e(2).mul(e(64)).unwrap().value(), 1);
    }

    #[test]
    fn inv_examples_match_exhaustive_search() {
        assert_eq!(e(1).inv().unwrap().value(), 1);
        assert_eq!(e(126).inv().unwrap().value(), 126);
        let brute = (1..127u16).find(|b| (2 * b) % 127 == 1).unwrap();
        assert_eq!(brute, 64);
        assert_eq!(e(2).inv().unwrap().value(), 64);
        assert!(matches!(e(0).inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn neg_examples() {
        assert_eq!(e(0).neg().value(), 0);
        assert_eq!(e(1).neg().value(), 126);
        assert_eq!(e(64).neg().value(), 63);
    }

    #[test]
    fn mismatched_moduli() {
        let a = Field::new(5).unwrap().one();
        let b = f127().one();
        assert!(matches!(a.add(b), Err(Error::ModulusMismatch { .. })));
        assert!(matches!(a.mul(b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn non_canonical_rejected() {
        assert!(f127().try_elem(127).is_err());
        assert_eq!(f127().elem(300).value(), (300u16 % 127) as u8);
    }

    #[test]
    fn symbol_bits() {
        assert_eq!(f127().symbol_bits(), 7);
        assert_eq!(Field::new(3).unwrap().symbol_bits(), 2);
        assert_eq!(Field::new(251).unwrap().symbol_bits(), 8);
    }

    #[test]
    fn every_nonzero_has_inverse_for_small_primes() {
        for q in [3u16, 5, 7, 11, 13, 127, 251] {
            let f = Field::new(q).unwrap();
            for a in 1..q as u8 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    proptest! {
        #[test]
        fn axioms(a in 0u8..127, b in 0u8..127, c in 0u8..127) {
            let (a, b, c) = (e(a), e(b), e(c));
            prop_assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
            prop_assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
            prop_assert_eq!(a.add(b).unwrap().add(c).unwrap(), a.add(b.add(c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(b.mul(c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(b.add(c).unwrap()).unwrap(),
                a.mul(b).unwrap().add(a.mul(c).unwrap()).unwrap()
            );
            prop_assert!(a.add(a.neg()).unwrap().is_zero());
            prop_assert_eq!(a.sub(b).unwrap(), a.add(b.neg()).unwrap());
            if !a.is_zero() {
                prop_assert_eq!(a.mul(a.inv().unwrap()).unwrap(), f127().one());
            }
        }
    }
}
