//! Parameter sets, the density polynomial `d(x)` governing entries of the
//! secret transform `S`, and the built-in registry.

use std::fmt;

use rand::RngCore;
use serde::Deserialize;

use crate::error::{Error, ParseError, Result};
use crate::field::Field;

/// Bumped whenever a built-in set changes.
pub const REGISTRY_VERSION: u32 = 1;

pub const DEFAULT_MAX_SIGN_ATTEMPTS: u32 = 10_000;

/// One coefficient `d_i = numerator / denominator` of `d(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DensityTerm {
    pub symbol: u8,
    pub numerator: u32,
    pub denominator: u32,
}

impl DensityTerm {
    pub fn fraction(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// `d(x) = sum_i d_i x^i`: the fraction of entries equal to `i` in each row
/// of `S`. Terms are kept sorted by symbol with zero fractions dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensityPolynomial {
    terms: Vec<DensityTerm>,
}

const SUM_TOLERANCE: f64 = 1e-9;

impl DensityPolynomial {
    pub fn new(mut terms: Vec<DensityTerm>) -> Result<Self> {
        for t in &terms {
            if t.denominator == 0 {
                return Err(Error::InvalidDensity(format!(
                    "zero denominator for x^{}",
                    t.symbol
                )));
            }
            if t.numerator > t.denominator {
                return Err(Error::InvalidDensity(format!("d_{} exceeds 1", t.symbol)));
            }
        }
        terms.sort_by_key(|t| t.symbol);
        if terms.windows(2).any(|w| w[0].symbol == w[1].symbol) {
            return Err(Error::InvalidDensity("repeated symbol".into()));
        }
        terms.retain(|t| t.numerator != 0);
        for t in &mut terms {
            let g = gcd(t.numerator as u64, t.denominator as u64) as u32;
            t.numerator /= g;
            t.denominator /= g;
        }
        let sum: f64 = terms.iter().map(DensityTerm::fraction).sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "coefficients sum to {sum}, not 1"
            )));
        }
        Ok(Self { terms })
    }

    /// `d(x) = 0.5 + 0.5x`, the uniform binary transform.
    pub fn uniform_binary() -> Self {
        Self::binary(1, 2).expect("1/2 is a valid fraction")
    }

    /// `d(x) = (1 - a/b) + (a/b) x`.
    pub fn binary(ones: u32, denominator: u32) -> Result<Self> {
        if ones > denominator {
            return Err(Error::InvalidDensity("fraction of ones exceeds 1".into()));
        }
        Self::new(vec![
            DensityTerm {
                symbol: 0,
                numerator: denominator - ones,
                denominator,
            },
            DensityTerm {
                symbol: 1,
                numerator: ones,
                denominator,
            },
        ])
    }

    /// Parses `"d0,d1[,i:di...]"`. Coefficients are decimals (`0.5783`) or
    /// fractions (`1/3`). The sum must be 1 within 1e-9.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_terms(s)?)
    }

    /// Like [`parse`](Self::parse), but `d_0` is replaced by the residual
    /// `1 - sum_{i>0} d_i`. Handy for published coefficient lists that are
    /// rounded and do not quite sum to 1.
    pub fn parse_with_residual(s: &str) -> Result<Self> {
        let terms = parse_terms(s)?;
        Self::with_zero_residual(terms)
    }

    fn with_zero_residual(terms: Vec<DensityTerm>) -> Result<Self> {
        let rest: Vec<DensityTerm> = terms.into_iter().filter(|t| t.symbol != 0).collect();
        let lcm = rest.iter().try_fold(1u64, |acc, t| {
            let l = acc / gcd(acc, t.denominator as u64) * t.denominator as u64;
            (l <= u32::MAX as u64).then_some(l)
        });
        let lcm = lcm.ok_or_else(|| Error::InvalidDensity("denominators too large".into()))?;
        let used: u64 = rest
            .iter()
            .map(|t| t.numerator as u64 * (lcm / t.denominator as u64))
            .sum();
        if used > lcm {
            return Err(Error::InvalidDensity(
                "nonzero symbols already exceed total mass 1".into(),
            ));
        }
        let mut all = vec![DensityTerm {
            symbol: 0,
            numerator: (lcm - used) as u32,
            denominator: lcm as u32,
        }];
        all.extend(rest);
        Self::new(all)
    }

    pub fn terms(&self) -> &[DensityTerm] {
        &self.terms
    }

    pub fn probability(&self, symbol: u8) -> f64 {
        self.terms
            .iter()
            .find(|t| t.symbol == symbol)
            .map_or(0.0, DensityTerm::fraction)
    }

    pub fn max_symbol(&self) -> u8 {
        self.terms.last().map_or(0, |t| t.symbol)
    }

    /// `Some(d_1)` when the support is within `{0, 1}`.
    pub fn binary_fraction(&self) -> Option<f64> {
        (self.max_symbol() <= 1).then(|| self.probability(1))
    }

    pub fn sampler(&self) -> DensitySampler {
        // Most likely symbol first so the scan usually stops early.
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| b.fraction().total_cmp(&a.fraction()));
        let mut cum = 0.0;
        let mut thresholds = Vec::with_capacity(terms.len());
        let mut symbols = Vec::with_capacity(terms.len());
        for t in &terms {
            cum += t.fraction();
            thresholds.push(if cum >= 1.0 {
                u64::MAX
            } else {
                (cum * 2f64.powi(64)) as u64
            });
            symbols.push(t.symbol);
        }
        if let Some(last) = thresholds.last_mut() {
            *last = u64::MAX;
        }
        DensitySampler {
            thresholds,
            symbols,
        }
    }
}

impl fmt::Display for DensityPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            match t.symbol {
                0 => write!(f, "{}", t.fraction())?,
                1 => write!(f, "{}x", t.fraction())?,
                s => write!(f, "{}x^{s}", t.fraction())?,
            }
        }
        Ok(())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn parse_fraction(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::InvalidDensity(format!("cannot parse coefficient {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        let d: u32 = d.trim().parse().map_err(|_| bad())?;
        return Ok((n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 9
    {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let frac_v: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac_v))
        .ok_or_else(bad)?;
    if num > den {
        return Err(Error::InvalidDensity(format!("coefficient {s} exceeds 1")));
    }
    Ok((num as u32, den as u32))
}

fn parse_terms(s: &str) -> Result<Vec<DensityTerm>> {
    let mut terms = Vec::new();
    for (pos, tok) in s.split(',').enumerate() {
        let tok = tok.trim();
        let (symbol, coeff) = match tok.split_once(':') {
            Some((i, c)) => {
                let i: u8 = i
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidDensity(format!("bad symbol in {tok:?}")))?;
                (i, c)
            }
            None if pos < 2 => (pos as u8, tok),
            None => {
                return Err(Error::InvalidDensity(format!(
                    "term {tok:?} after d0,d1 needs the form i:d_i"
                )))
            }
        };
        let (numerator, denominator) = parse_fraction(coeff)?;
        terms.push(DensityTerm {
            symbol,
            numerator,
            denominator,
        });
    }
    Ok(terms)
}

/// Draws symbols distributed as `d(x)` from 64-bit uniforms.
#[derive(Clone, Debug)]
pub struct DensitySampler {
    thresholds: Vec<u64>,
    symbols: Vec<u8>,
}

impl DensitySampler {
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u8 {
        let u = rng.next_u64();
        for (t, &s) in self.thresholds.iter().zip(&self.symbols) {
            if u < *t {
                return s;
            }
        }
        *self.symbols.last().expect("nonempty density")
    }

    pub fn fill<R: RngCore + ?Sized>(&self, rng: &mut R, out: &mut [u8]) {
        for v in out {
            *v = self.sample(rng);
        }
    }
}

/// Scheme parameters: `n = n0 p`, `k = k0 p`, `r = (n0 - k0) p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParameterSet {
    pub q: u16,
    pub p: usize,
    pub n0: usize,
    pub k0: usize,
    /// Syndrome weight.
    pub w: usize,
    /// Row weight of the secret generator matrix.
    pub w_g: usize,
    /// Generator rows summed per random codeword.
    pub m_g: usize,
    pub density: DensityPolynomial,
    pub max_sign_attempts: u32,
}

impl ParameterSet {
    pub fn n(&self) -> usize {
        self.n0 * self.p
    }

    pub fn k(&self) -> usize {
        self.k0 * self.p
    }

    pub fn r0(&self) -> usize {
        self.n0 - self.k0
    }

    pub fn r(&self) -> usize {
        self.r0() * self.p
    }

    /// Target codeword weight `w_c = m_g * w_g`.
    pub fn codeword_weight(&self) -> usize {
        self.m_g * self.w_g
    }

    pub fn field(&self) -> Result<Field> {
        Field::new(self.q)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        let field = self.field()?;
        for (name, v) in [
            ("p", self.p),
            ("n0", self.n0),
            ("k0", self.k0),
            ("w", self.w),
            ("w_g", self.w_g),
            ("m_g", self.m_g),
        ] {
            if v > u16::MAX as usize {
                return bad(format!("{name} = {v} does not fit the 16-bit header field"));
            }
        }
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        if self.k0 == 0 || self.k0 >= self.n0 {
            return bad(format!(
                "need 0 < k0 < n0, got k0 = {}, n0 = {}",
                self.k0, self.n0
            ));
        }
        if self.w == 0 || self.w > self.r() {
            return bad(format!(
                "syndrome weight w = {} must lie in [1, r = {}]",
                self.w,
                self.r()
            ));
        }
        if self.w >= self.q as usize {
            return bad(format!("w = {} must be below q = {}", self.w, self.q));
        }
        if self.w_g == 0 || self.w_g > self.n() {
            return bad(format!(
                "w_g = {} must lie in [1, n = {}]",
                self.w_g,
                self.n()
            ));
        }
        if self.m_g > self.k() {
            return bad(format!("m_g = {} exceeds k = {}", self.m_g, self.k()));
        }
        if self.m_g >= self.q as usize {
            return bad(format!("m_g = {} must be below q = {}", self.m_g, self.q));
        }
        if self.density.max_symbol() >= field.q() {
            return bad(format!(
                "density uses symbol {} >= q",
                self.density.max_symbol()
            ));
        }
        if self.max_sign_attempts == 0 {
            return bad("max_sign_attempts must be positive".into());
        }
        Ok(())
    }

    /// Reads the TOML form used for external params files.
    pub fn from_toml(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct File {
            q: u16,
            p: usize,
            n0: usize,
            k0: usize,
            w: usize,
            w_g: usize,
            m_g: usize,
            density: String,
            max_sign_attempts: Option<u32>,
        }
        let f: File =
            toml::from_str(s).map_err(|e| ParseError::Invalid(format!("params file: {e}")))?;
        let set = Self {
            q: f.q,
            p: f.p,
            n0: f.n0,
            k0: f.k0,
            w: f.w,
            w_g: f.w_g,
            m_g: f.m_g,
            density: DensityPolynomial::parse(&f.density)?,
            max_sign_attempts: f.max_sign_attempts.unwrap_or(DEFAULT_MAX_SIGN_ATTEMPTS),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn to_toml(&self) -> String {
        let density: Vec<String> = self
            .density
            .terms()
            .iter()
            .map(|t| format!("{}:{}/{}", t.symbol, t.numerator, t.denominator))
            .collect();
        format!(
            "q = {}\np = {}\nn0 = {}\nk0 = {}\nw = {}\nw_g = {}\nm_g = {}\ndensity = \"{}\"\nmax_sign_attempts = {}\n",
            self.q,
            self.p,
            self.n0,
            self.k0,
            self.w,
            self.w_g,
            self.m_g,
            density.join(","),
            self.max_sign_attempts
        )
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q = {}", self.q)?;
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "n0 = {}  (n = {})", self.n0, self.n())?;
        writeln!(f, "k0 = {}  (k = {})", self.k0, self.k())?;
        writeln!(f, "r0 = {}  (r = {})", self.r0(), self.r())?;
        writeln!(f, "w = {}", self.w)?;
        writeln!(f, "w_g = {}", self.w_g)?;
        writeln!(f, "m_g = {}", self.m_g)?;
        writeln!(f, "d(x) = {}", self.density)?;
        write!(f, "max_sign_attempts = {}", self.max_sign_attempts)
    }
}

/// Names of the built-in parameter sets.
pub const BUILTIN_NAMES: &[&str] = &["desk", "desk-2x", "spanse-128"];

/// Looks up a built-in set.
///
/// `spanse-128` rounds the published instance (n = 24000, p = 101) up to
/// the nearest block-divisible code, n0 = 238 and k0 = 119.
pub fn builtin(name: &str) -> Option<ParameterSet> {
    let base = |p, n0, k0, w, w_g, m_g| ParameterSet {
        q: 127,
        p,
        n0,
        k0,
        w,
        w_g,
        m_g,
        density: DensityPolynomial::uniform_binary(),
        max_sign_attempts: DEFAULT_MAX_SIGN_ATTEMPTS,
    };
    match name {
        "desk" => Some(base(13, 20, 10, 6, 5, 4)),
        "desk-2x" => Some(base(13, 40, 20, 6, 5, 4)),
        "spanse-128" => Some(base(101, 238, 119, 26, 11, 12)),
        _ => None,
    }
}
