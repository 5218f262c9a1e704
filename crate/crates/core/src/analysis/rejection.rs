//! How often a signing attempt produces a zero entry in `sigma`.
//!
//! The analytic model treats the codeword entries seen by a row of `S` as
//! Bernoulli with parameter `rho_c = 1 - (1 - w_g/n)^m_g` and the ones of
//! `S` as Bernoulli with `rho_S = d_1`, then treats the `n` entries of
//! `sigma` as independent. The Monte Carlo estimator simulates the actual
//! quasi-cyclic construction instead.

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::DensityPolynomial;

use super::attack::ln_binomial;
use super::CodeDims;

/// Upper tail of the codeword-mass binomial that the model may drop.
const TAIL_MASS: f64 = 1e-15;

/// `f_rho(m, x) = C(m, x) rho^x (1 - rho)^(m - x)`.
pub fn binomial_pmf(m: usize, rho: f64, x: usize) -> f64 {
    if x > m {
        return 0.0;
    }
    if rho <= 0.0 {
        return (x == 0) as u8 as f64;
    }
    if rho >= 1.0 {
        return (x == m) as u8 as f64;
    }
    let ln =
        ln_binomial(m as f64, x as f64) + x as f64 * rho.ln() + (m - x) as f64 * (-rho).ln_1p();
    ln.exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RejectionEstimate {
    /// Chance a single entry of `sigma` is zero.
    pub p_zero_entry: f64,
    /// Chance one signing attempt succeeds.
    pub p_valid: f64,
    /// `1 - p_valid`, computed without cancellation.
    pub p_reject: f64,
    pub expected_attempts: f64,
}

impl RejectionEstimate {
    fn from_zero_entry(p_zero_entry: f64, n: usize) -> Self {
        let ln_valid = n as f64 * (-p_zero_entry).ln_1p();
        let p_valid = ln_valid.exp();
        Self {
            p_zero_entry,
            p_valid,
            p_reject: -ln_valid.exp_m1(),
            expected_attempts: 1.0 / p_valid,
        }
    }
}

/// The distributions behind [`rejection_rate_analytic`].
#[derive(Clone, Debug, PartialEq)]
pub struct RejectionModel {
    pub rho_c: f64,
    pub rho_s: f64,
    /// The sum over the codeword mass `z` stops here.
    pub z_cap: usize,
    /// `Pr[c~ = x]` for `x` in `[0, q)`.
    pub c_dist: Vec<f64>,
    /// `Pr[e~ = x]` for `x` in `[0, w]`.
    pub e_dist: Vec<f64>,
}

impl RejectionModel {
    /// Requires a binary density `d(x) = d_0 + d_1 x`.
    pub fn new(dims: &CodeDims, density: &DensityPolynomial) -> Result<Self> {
        let rho_s = density.binary_fraction().ok_or_else(|| {
            Error::Domain("the analytic model needs a binary d(x); use Monte Carlo".into())
        })?;
        let (n, q) = (dims.n, dims.q as usize);
        if dims.w_g > n {
            return Err(Error::Domain(format!("w_g = {} exceeds n = {n}", dims.w_g)));
        }
        let rho_c = if n == 0 {
            0.0
        } else {
            1.0 - (1.0 - dims.w_g as f64 / n as f64).powi(dims.m_g as i32)
        };
        let z_cap = n.min((4 * dims.m_g * dims.w_g).max(tail_point(n, rho_c)));
        let mut c_dist = vec![0.0; q];
        for z in 0..=z_cap {
            let pz = binomial_pmf(n, rho_c, z);
            if pz == 0.0 {
                continue;
            }
            for x in 0..=z {
                c_dist[x % q] += pz * binomial_pmf(z, rho_s, x);
            }
        }
        let e_dist = (0..=dims.w)
            .map(|x| binomial_pmf(dims.w, rho_s, x))
            .collect();
        Ok(Self {
            rho_c,
            rho_s,
            z_cap,
            c_dist,
            e_dist,
        })
    }

    /// `Pr[sigma_i = 0] = sum_x Pr[c~ = x] Pr[e~ = -x mod q]`.
    pub fn p_zero_entry(&self) -> f64 {
        let q = self.c_dist.len();
        let mut e_mod = vec![0.0; q];
        for (x, &pr) in self.e_dist.iter().enumerate() {
            e_mod[x % q] += pr;
        }
        (0..q).map(|x| self.c_dist[x] * e_mod[(q - x) % q]).sum()
    }
}

// Smallest z with Pr[Bin(n, rho) > z] < TAIL_MASS.
fn tail_point(n: usize, rho: f64) -> usize {
    let mut cum = 0.0;
    for z in 0..=n {
        cum += binomial_pmf(n, rho, z);
        if 1.0 - cum < TAIL_MASS {
            return z;
        }
    }
    n
}

pub fn rejection_rate_analytic(
    dims: &CodeDims,
    density: &DensityPolynomial,
) -> Result<RejectionEstimate> {
    let model = RejectionModel::new(dims, density)?;
    Ok(RejectionEstimate::from_zero_entry(
        model.p_zero_entry(),
        dims.n,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
    /// Trials sharing one generator draw.
    pub batch_size: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl MonteCarloConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            batch_size: 1000,
            threads: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub rejected: u64,
    pub p_valid: f64,
    pub p_reject: f64,
    /// Binomial standard error of either fraction.
    pub stderr: f64,
}

/// Simulates signing attempts on the real quasi-cyclic structure.
///
/// Each batch draws a fresh generator. Each trial draws `u` of weight
/// `m_g`, a weight-`w` syndrome placed in the last `r` positions, and the
/// circulant blocks of `S` it touches, then checks `sigma` for a zero.
/// Batch `i` uses ChaCha8 stream `i` under `seed`, so the result does not
/// depend on the thread count.
pub fn rejection_rate_montecarlo(
    dims: &CodeDims,
    density: &DensityPolynomial,
    config: &MonteCarloConfig,
) -> Result<MonteCarloEstimate> {
    let setup = Simulation::new(dims, density)?;
    if config.trials == 0 || config.batch_size == 0 {
        return Err(Error::Domain("need at least one trial per batch".into()));
    }
    let batches = config.trials.div_ceil(config.batch_size);
    let run = || -> u64 {
        (0..batches)
            .into_par_iter()
            .map(|i| {
                let size = config.batch_size.min(config.trials - i * config.batch_size);
                setup.run_batch(config.seed, i, size)
            })
            .sum()
    };
    let rejected = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let p_reject = rejected as f64 / config.trials as f64;
    Ok(MonteCarloEstimate {
        trials: config.trials,
        rejected,
        p_valid: 1.0 - p_reject,
        p_reject,
        stderr: (p_reject * (1.0 - p_reject) / config.trials as f64).sqrt(),
    })
}

struct Simulation {
    q: u32,
    p: usize,
    n0: usize,
    k0: usize,
    w: usize,
    w_g: usize,
    m_g: usize,
    thresholds: Vec<u32>,
    symbols: Vec<u32>,
}

impl Simulation {
    fn new(dims: &CodeDims, density: &DensityPolynomial) -> Result<Self> {
        let CodeDims {
            q,
            n,
            k,
            p,
            w,
            w_g,
            m_g,
        } = *dims;
        if p == 0 || n % p != 0 || k % p != 0 || k >= n || k == 0 {
            return Err(Error::Domain(format!(
                "Monte Carlo needs 0 < k < n, both multiples of p (n = {n}, k = {k}, p = {p})"
            )));
        }
        if w > n - k || w_g == 0 || w_g > n || m_g > k {
            return Err(Error::Domain("weights out of range for the code".into()));
        }
        if density.max_symbol() as u16 >= q {
            return Err(Error::Domain("density uses a symbol >= q".into()));
        }
        // 32-bit thresholds, most likely symbol first
        let mut terms = density.terms().to_vec();
        terms.sort_by(|a, b| b.fraction().total_cmp(&a.fraction()));
        let mut cum = 0.0;
        let mut thresholds = Vec::new();
        let mut symbols = Vec::new();
        for t in &terms {
            cum += t.fraction();
            thresholds.push((cum * 2f64.powi(32)).min(u32::MAX as f64) as u32);
            symbols.push(t.symbol as u32);
        }
        if let Some(last) = thresholds.last_mut() {
            *last = u32::MAX;
        }
        Ok(Self {
            q: q as u32,
            p,
            n0: n / p,
            k0: k / p,
            w,
            w_g,
            m_g,
            thresholds,
            symbols,
        })
    }

    #[inline]
    fn symbol(&self, rng: &mut ChaCha8Rng) -> u32 {
        let u = rng.next_u32();
        for (&t, &s) in self.thresholds.iter().zip(&self.symbols) {
            if u < t {
                return s;
            }
        }
        self.symbols[self.symbols.len() - 1]
    }

    fn run_batch(&self, seed: u64, batch: u64, trials: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let (p, n) = (self.p, self.n0 * self.p);
        let (k, r) = (self.k0 * p, (self.n0 - self.k0) * p);
        let rows: Vec<Vec<usize>> = (0..self.k0)
            .map(|_| index::sample(&mut rng, n, self.w_g).into_vec())
            .collect();

        let mut terms: Vec<(usize, u32)> = Vec::new();
        let mut columns: Vec<(usize, Vec<(usize, u32)>)> = Vec::new();
        let mut poly = vec![0u32; p];
        let mut acc = vec![0u32; p];
        let mut rejected = 0;
        for _ in 0..trials {
            terms.clear();
            for row in index::sample(&mut rng, k, self.m_g) {
                let (b, o) = (row / p, row % p);
                terms.extend(
                    rows[b]
                        .iter()
                        .map(|&pos| ((pos / p) * p + (pos % p + o) % p, 1)),
                );
            }
            terms.extend(
                index::sample(&mut rng, r, self.w)
                    .into_iter()
                    .map(|j| (k + j, 1)),
            );
            terms.sort_unstable_by_key(|&(i, _)| i);

            // group (e + c) by block column, summing repeated positions
            columns.clear();
            for &(i, v) in &terms {
                let (bi, oi) = (i / p, i % p);
                match columns.last_mut() {
                    Some((b, ents)) if *b == bi => match ents.last_mut() {
                        Some(last) if last.0 == oi => last.1 += v,
                        _ => ents.push((oi, v)),
                    },
                    _ => columns.push((bi, vec![(oi, v)])),
                }
            }

            // sigma^T = S (e + c)^T, one block row of S at a time. Entry
            // (oj, oi) of a circulant block is b[(oj - oi) mod p] for an
            // i.i.d. coefficient vector b.
            let mut zero = false;
            for _bj in 0..self.n0 {
                acc.iter_mut().for_each(|a| *a = 0);
                for (_, ents) in &columns {
                    for c in poly.iter_mut() {
                        *c = self.symbol(&mut rng);
                    }
                    for &(oi, v) in ents {
                        let (head, tail) = acc.split_at_mut(oi);
                        for (a, &b) in tail.iter_mut().zip(&poly[..p - oi]) {
                            *a += v * b;
                        }
                        for (a, &b) in head.iter_mut().zip(&poly[p - oi..]) {
                            *a += v * b;
                        }
                    }
                }
                if acc.iter().any(|&a| a % self.q == 0) {
                    zero = true;
                    break;
                }
            }
            rejected += zero as u64;
        }
        rejected
    }
}
