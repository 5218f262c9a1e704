//! Brute-force forgery probability and the PGE+SS cost model: partial
//! Gaussian elimination on `u = phi * n` positions, then a depth-`b` tree of
//! list merges on the remaining `n' = (1 - phi) n`.

use serde::Serialize;

use crate::error::{Error, Result};

use super::CodeDims;

/// `log2 C(m, t)` via log-gamma.
pub fn log2_binomial(m: u64, t: u64) -> Result<f64> {
    if t > m {
        return Err(Error::Domain(format!("C({m}, {t}) with t > m")));
    }
    Ok(ln_binomial(m as f64, t as f64) / std::f64::consts::LN_2)
}

pub(crate) fn ln_binomial(m: f64, t: f64) -> f64 {
    libm::lgamma(m + 1.0) - libm::lgamma(t + 1.0) - libm::lgamma(m - t + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BruteForce {
    /// `n * log2((q - 1) / q)`: chance a random vector is zero-free.
    pub zero_free_log2: f64,
    /// `log2 p_BF`, adding the `q^-r` chance of hitting the syndrome.
    pub p_bf_log2: f64,
}

pub fn brute_force_log2(dims: &CodeDims) -> BruteForce {
    brute_force_terms(dims.q, dims.n, dims.r())
}

/// `p_BF = (q - 1)^n / (q^n q^r)` for explicit `n` and `r`.
pub fn brute_force_terms(q: u16, n: usize, r: usize) -> BruteForce {
    let q = q as f64;
    let zero_free_log2 = n as f64 * ((q - 1.0) / q).log2();
    BruteForce {
        zero_free_log2,
        p_bf_log2: zero_free_log2 - r as f64 * q.log2(),
    }
}

/// Tree depth `b`, list exponent `nu` (lists hold `2^(nu n')` entries) and
/// the eliminated fraction `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttackPoint {
    pub b: u32,
    pub nu: f64,
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub point: AttackPoint,
    /// `N' = 2^(rho n)`: expected size of the final merged list.
    pub rho: f64,
    /// Per-`n` exponent of the chance one candidate survives the filter.
    pub chi: f64,
    pub iter_cost_log2: f64,
    pub success_prob_log2: f64,
    pub t_sdp_log2: f64,
    /// `T_SDP / sqrt(p)`, assuming the DOOM gain carries over to the
    /// large-weight regime.
    pub t_doom_log2: f64,
}

/// Largest admissible `nu` for depth `b`, exclusive.
pub fn nu_bound(b: u32, q: u16) -> f64 {
    (q as f64 - 1.0).log2() / 2f64.powi(b as i32)
}

/// Largest admissible depth for a given `phi`.
pub fn depth_bound(phi: f64, n: usize) -> u32 {
    ((1.0 - phi) * n as f64).log2().floor().max(0.0) as u32
}

/// Evaluates the cost model at one point, checking its constraints.
pub fn pge_ss_exponents(point: AttackPoint, dims: &CodeDims) -> Result<CostReport> {
    let AttackPoint { b, nu, phi } = point;
    let rate = dims.rate();
    if b == 0 {
        return Err(Error::Domain("tree depth b must be at least 1".into()));
    }
    if nu.is_nan() || nu <= 0.0 {
        return Err(Error::Domain(format!("nu = {nu} must be positive")));
    }
    if !(phi > 0.0 && phi < 1.0 - rate) {
        return Err(Error::Domain(format!(
            "phi = {phi} outside (0, 1 - R = {})",
            1.0 - rate
        )));
    }
    let nu_max = nu_bound(b, dims.q);
    if nu >= nu_max {
        return Err(Error::Domain(format!(
            "nu = {nu} violates nu < 2^-b log2(q - 1) = {nu_max}"
        )));
    }
    let b_max = depth_bound(phi, dims.n);
    if b > b_max {
        return Err(Error::Domain(format!(
            "b = {b} violates b <= floor(log2((1 - phi) n)) = {b_max}"
        )));
    }
    Ok(evaluate(point, dims))
}

fn evaluate(point: AttackPoint, dims: &CodeDims) -> CostReport {
    let AttackPoint { b, nu, phi } = point;
    let n = dims.n as f64;
    let log2q = (dims.q as f64).log2();
    let rate_shortened = dims.rate() / (1.0 - phi);
    let rho = ((b as f64 + 1.0) * nu - (1.0 - rate_shortened) * log2q) * (1.0 - phi);
    let chi = rho + phi * (1.0 - 1.0 / dims.q as f64).log2();
    let iter_cost_log2 = (nu * (1.0 - phi)).max(rho) * n;
    let success_prob_log2 = chi.min(0.0) * n;
    let t_sdp_log2 = iter_cost_log2 - success_prob_log2;
    CostReport {
        point,
        rho,
        chi,
        iter_cost_log2,
        success_prob_log2,
        t_sdp_log2,
        t_doom_log2: t_sdp_log2 - 0.5 * (dims.p as f64).log2(),
    }
}

/// Resolution of the `phi` search in [`optimize_attack`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Interior points in the coarse `phi` grid and in each refinement.
    pub grid_points: usize,
    /// Coarse cells refined per depth.
    pub starts: usize,
    pub min_refinements: usize,
    /// Refinement stops once the `phi` grid is finer than this.
    pub phi_spacing: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 1000,
            starts: 8,
            min_refinements: 2,
            phi_spacing: 1e-7,
        }
    }
}

/// Minimizes `t_doom_log2` over every depth `b`, `phi` on a refined grid
/// and `nu` exactly.
///
/// For fixed `(b, phi)` the cost is piecewise linear and convex in `nu`,
/// with kinks where `nu (1 - phi) = rho` and where `chi = 0`, so the best
/// `nu` is one of those two (clamped into the open admissible interval).
pub fn optimize_attack(dims: &CodeDims, config: &SearchConfig) -> Result<CostReport> {
    let phi_max = 1.0 - dims.rate();
    if phi_max.is_nan() || phi_max <= 0.0 || dims.n < 2 || dims.q < 3 {
        return Err(Error::Domain("no feasible attack region".into()));
    }
    let steps = config.grid_points.max(2);
    let mut best: Option<CostReport> = None;
    for b in 1..=depth_bound(0.0, dims.n) {
        let step = phi_max / (steps + 1) as f64;
        let mut coarse: Vec<CostReport> = (1..=steps)
            .filter_map(|j| best_nu(b, step * j as f64, dims))
            .collect();
        coarse.sort_by(|x, y| x.t_doom_log2.total_cmp(&y.t_doom_log2));
        for start in coarse.into_iter().take(config.starts.max(1)) {
            let mut center = start;
            let mut step = step;
            let mut pass = 0;
            while pass < config.min_refinements || step > config.phi_spacing {
                let phi = center.point.phi;
                let lo = (phi - 2.0 * step).max(0.0);
                let hi = (phi + 2.0 * step).min(phi_max);
                step = (hi - lo) / (steps + 1) as f64;
                for j in 1..=steps {
                    if let Some(c) = best_nu(b, lo + step * j as f64, dims) {
                        if c.t_doom_log2 < center.t_doom_log2 {
                            center = c;
                        }
                    }
                }
                pass += 1;
            }
            if best.is_none_or(|x| center.t_doom_log2 < x.t_doom_log2) {
                best = Some(center);
            }
        }
    }
    best.ok_or_else(|| Error::Domain("no admissible attack point".into()))
}

// Fraction of the admissible `nu` range kept clear of its open ends.
const NU_MARGIN: f64 = 1e-9;

fn best_nu(b: u32, phi: f64, dims: &CodeDims) -> Option<CostReport> {
    let nu_max = nu_bound(b, dims.q);
    let log2q = (dims.q as f64).log2();
    // rho = ((b + 1) nu + c0) (1 - phi)
    let c0 = -(1.0 - dims.rate() / (1.0 - phi)) * log2q;
    let zero_chi = -phi * (1.0 - 1.0 / dims.q as f64).log2() / (1.0 - phi);
    let lo = nu_max * NU_MARGIN;
    let hi = nu_max * (1.0 - NU_MARGIN);
    [-c0 / b as f64, (zero_chi - c0) / (b as f64 + 1.0), lo, hi]
        .into_iter()
        .map(|nu| nu.clamp(lo, hi))
        .filter_map(|nu| pge_ss_exponents(AttackPoint { b, nu, phi }, dims).ok())
        .min_by(|x, y| x.t_doom_log2.total_cmp(&y.t_doom_log2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn exact_log2_binomial(m: u64, t: u64) -> f64 {
        let mut c = BigUint::from(1u32);
        for i in 0..t {
            c = c * (m - i) / (i + 1);
        }
        let bits = c.bits();
        if bits <= 52 {
            return (c.to_string().parse::<f64>().unwrap()).log2();
        }
        let shift = bits - 52;
        let top: f64 = (&c >> shift).to_string().parse().unwrap();
        top.log2() + shift as f64
    }

    #[test]
    fn binomial_matches_big_integers() {
        for m in 0..=60 {
            for t in 0..=m {
                let got = log2_binomial(m, t).unwrap();
                let want = exact_log2_binomial(m, t);
                assert!((got - want).abs() < 1e-9, "C({m},{t}): {got} vs {want}");
            }
        }
        assert!((log2_binomial(4, 2).unwrap() - 6f64.log2()).abs() < 1e-12);
        assert!(log2_binomial(3, 4).is_err());
    }

    #[test]
    fn binomial_at_large_m() {
        let got = log2_binomial(1_000_000, 500).unwrap();
        let want = exact_log2_binomial(1_000_000, 500);
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn brute_force_limits() {
        let bf = brute_force_terms(127, 0, 12000);
        assert_eq!(bf.zero_free_log2, 0.0);
        assert!((bf.p_bf_log2 + 12000.0 * 127f64.log2()).abs() < 1e-9);
        let wide = brute_force_terms(251, 10, 5).zero_free_log2;
        let narrow = brute_force_terms(3, 10, 5).zero_free_log2;
        assert!(narrow < wide && wide < 0.0);
    }

    #[test]
    fn chi_rho_identity() {
        let d = CodeDims::published();
        for (b, nu, phi) in [
            (9, 0.010725, 0.493),
            (3, 0.2, 0.1),
            (5, 0.05, 0.3),
            (1, 1.0, 0.01),
        ] {
            let c = pge_ss_exponents(AttackPoint { b, nu, phi }, &d).unwrap();
            assert!((c.chi - c.rho - phi * (1.0 - 1.0 / 127f64).log2()).abs() < 1e-15);
            assert!(c.t_doom_log2 < c.t_sdp_log2);
        }
        let p1 = CodeDims { p: 1, ..d };
        let c = pge_ss_exponents(
            AttackPoint {
                b: 9,
                nu: 0.01,
                phi: 0.4,
            },
            &p1,
        )
        .unwrap();
        assert_eq!(c.t_doom_log2, c.t_sdp_log2);
    }

    #[test]
    fn constraints_are_enforced() {
        let d = CodeDims::published();
        let edge = nu_bound(9, 127);
        assert!(pge_ss_exponents(
            AttackPoint {
                b: 9,
                nu: edge - 1e-9,
                phi: 0.4
            },
            &d
        )
        .is_ok());
        assert!(pge_ss_exponents(
            AttackPoint {
                b: 9,
                nu: edge + 1e-9,
                phi: 0.4
            },
            &d
        )
        .is_err());
        assert!(pge_ss_exponents(
            AttackPoint {
                b: 9,
                nu: 0.01,
                phi: 0.5
            },
            &d
        )
        .is_err());
        assert!(pge_ss_exponents(
            AttackPoint {
                b: 9,
                nu: 0.01,
                phi: 0.0
            },
            &d
        )
        .is_err());
        assert!(pge_ss_exponents(
            AttackPoint {
                b: 0,
                nu: 0.01,
                phi: 0.1
            },
            &d
        )
        .is_err());
        // (1 - phi) n = 12 leaves room for b <= 3 only
        let small = CodeDims { n: 24, k: 12, ..d };
        assert!(pge_ss_exponents(
            AttackPoint {
                b: 4,
                nu: 0.01,
                phi: 0.49
            },
            &small
        )
        .is_err());
        assert!(pge_ss_exponents(
            AttackPoint {
                b: 3,
                nu: 0.01,
                phi: 0.49
            },
            &small
        )
        .is_ok());
    }

    #[test]
    fn success_exponent_vanishes_as_phi_shrinks() {
        let d = CodeDims::published();
        // with rho >= 0 the filter term phi log2(1 - 1/q) is all of chi's deficit
        let c = pge_ss_exponents(
            AttackPoint {
                b: 1,
                nu: 3.4,
                phi: 1e-12,
            },
            &d,
        )
        .unwrap();
        assert!(c.success_prob_log2.abs() < 1e-6);
    }

    #[test]
    fn optimizer_handles_tiny_field() {
        let d = CodeDims {
            q: 3,
            n: 200,
            k: 100,
            p: 1,
            w: 5,
            w_g: 3,
            m_g: 1,
        };
        let c = optimize_attack(&d, &SearchConfig::default()).unwrap();
        assert!(c.t_doom_log2.is_finite());
        assert!(pge_ss_exponents(c.point, &d).is_ok());
    }

    #[test]
    fn exponent_is_linear_in_n() {
        let cfg = SearchConfig::default();
        let d = CodeDims {
            n: 6000,
            k: 3000,
            ..CodeDims::published()
        };
        let one = optimize_attack(&d, &cfg).unwrap().t_sdp_log2;
        let two = optimize_attack(
            &CodeDims {
                n: 12000,
                k: 6000,
                ..d
            },
            &cfg,
        )
        .unwrap()
        .t_sdp_log2;
        let ratio = two / one;
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }
}
