//! Security and efficiency estimates: brute-force forgery, the PGE+SS
//! attack cost with DOOM, signing rejection rates and sizes.
//!
//! These work on bare [`CodeDims`] rather than a validated
//! [`ParameterSet`], so the published figures can be reproduced at code
//! lengths that are not multiples of the circulant size.

mod attack;
mod rejection;
mod sizes;

use serde::Serialize;

use crate::params::ParameterSet;

pub use attack::{
    brute_force_log2, brute_force_terms, depth_bound, log2_binomial, nu_bound, optimize_attack,
    pge_ss_exponents, AttackPoint, BruteForce, CostReport, SearchConfig,
};
pub use rejection::{
    binomial_pmf, rejection_rate_analytic, rejection_rate_montecarlo, MonteCarloConfig,
    MonteCarloEstimate, RejectionEstimate, RejectionModel,
};
pub use sizes::{size_report, SizeReport};

/// Code dimensions and weights, with `r = n - k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodeDims {
    pub q: u16,
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub w: usize,
    pub w_g: usize,
    pub m_g: usize,
}

impl CodeDims {
    /// The published instance taken literally: `n = 24000`, `k = 12000`,
    /// `p = 101`, although 101 divides neither.
    pub fn published() -> Self {
        Self {
            q: 127,
            n: 24000,
            k: 12000,
            p: 101,
            w: 26,
            w_g: 11,
            m_g: 12,
        }
    }

    /// Dimensions of the `desk` set.
    pub fn desk() -> Self {
        Self {
            q: 127,
            n: 260,
            k: 130,
            p: 13,
            w: 6,
            w_g: 5,
            m_g: 4,
        }
    }

    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

impl From<&ParameterSet> for CodeDims {
    fn from(p: &ParameterSet) -> Self {
        Self {
            q: p.q,
            n: p.n(),
            k: p.k(),
            p: p.p,
            w: p.w,
            w_g: p.w_g,
            m_g: p.m_g,
        }
    }
}

/// Machine-readable summary. Only the parts that were computed appear.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct JsonReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_sdp_log2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_doom_log2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_valid: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_attempts: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pk_packed_bytes: Option<f64>,
    #[serde(rename = "log2_Ns", skip_serializing_if = "Option::is_none")]
    pub log2_ns: Option<f64>,
    #[serde(rename = "log2_Nc", skip_serializing_if = "Option::is_none")]
    pub log2_nc: Option<f64>,
}

impl JsonReport {
    pub fn with_attack(mut self, c: &CostReport) -> Self {
        self.t_sdp_log2 = Some(c.t_sdp_log2);
        self.t_doom_log2 = Some(c.t_doom_log2);
        self.b = Some(c.point.b);
        self.nu = Some(c.point.nu);
        self.phi = Some(c.point.phi);
        self
    }

    pub fn with_rejection(mut self, p_valid: f64) -> Self {
        self.p_valid = Some(p_valid);
        self.expected_attempts = Some(1.0 / p_valid);
        self
    }

    pub fn with_sizes(mut self, s: &SizeReport) -> Self {
        self.pk_packed_bytes = Some(s.pk_packed_bytes);
        self.log2_ns = Some(s.log2_ns);
        self.log2_nc = Some(s.log2_nc);
        self
    }
}
