use rand::RngCore;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::{Digest, Sha3_256, Shake256};

use crate::error::Result;
use crate::params::ParameterSet;
use crate::qcalg::SparseVector;

const TAG_MESSAGE: &[u8] = b"SPANSE-v1/message";
const TAG_THETA: &[u8] = b"SPANSE-v1/theta";
const TAG_SYNDROME: &[u8] = b"SPANSE-v1/syndrome";

/// Length of a randomized or derived `Theta`.
pub const THETA_LEN: usize = 32;

/// How the public parameter `Theta` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ThetaMode {
    /// `Theta` is a hash of the message, so signing is reproducible.
    Deterministic,
    /// Fresh random bytes per signature.
    Randomized,
}

/// The message digest `H(m)`.
pub fn message_digest(message: &[u8]) -> [u8; 32] {
    let mut h = Sha3_256::new();
    Digest::update(&mut h, TAG_MESSAGE);
    Digest::update(&mut h, message);
    h.finalize().into()
}

pub fn choose_theta<R: RngCore + ?Sized>(message: &[u8], mode: ThetaMode, rng: &mut R) -> Vec<u8> {
    match mode {
        ThetaMode::Deterministic => {
            let mut h = Sha3_256::new();
            Digest::update(&mut h, TAG_THETA);
            Digest::update(&mut h, message);
            h.finalize().to_vec()
        }
        ThetaMode::Randomized => {
            let mut theta = vec![0; THETA_LEN];
            rng.fill_bytes(&mut theta);
            theta
        }
    }
}

/// `s = F_Theta(H(m))`: a binary vector of length `r` and weight `w`.
///
/// SHAKE256 over the tag, the digest and the length-prefixed `Theta` is
/// read as little-endian `u32` candidates, masked to the next power of
/// two, and values `>= r` are rejected. The first `w` distinct survivors
/// form the support.
pub fn derive_syndrome(
    message: &[u8],
    theta: &[u8],
    params: &ParameterSet,
) -> Result<SparseVector> {
    let (r, w) = (params.r(), params.w);
    let mut xof = Shake256::default();
    xof.update(TAG_SYNDROME);
    xof.update(&message_digest(message));
    xof.update(&(theta.len() as u64).to_le_bytes());
    xof.update(theta);
    let mut reader = xof.finalize_xof();
    let mask = (r as u64).next_power_of_two().saturating_sub(1).max(1) as u32;
    let mut support: Vec<usize> = Vec::with_capacity(w);
    let mut seen = vec![false; r];
    let mut buf = [0u8; 4];
    while support.len() < w {
        reader.read(&mut buf);
        let cand = (u32::from_le_bytes(buf) & mask) as usize;
        if cand < r && !std::mem::replace(&mut seen[cand], true) {
            support.push(cand);
        }
    }
    SparseVector::from_support(r, &support)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::builtin;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn syndrome_is_deterministic_with_exact_weight() {
        let params = builtin("desk").unwrap();
        let a = derive_syndrome(b"hello", b"theta", &params).unwrap();
        assert_eq!(a, derive_syndrome(b"hello", b"theta", &params).unwrap());
        assert_eq!(a.weight(), params.w);
        assert_eq!(a.len(), params.r());
        assert!(a.entries().iter().all(|&(_, v)| v == 1));
        assert_ne!(a, derive_syndrome(b"hello", b"theta2", &params).unwrap());
        assert_ne!(a, derive_syndrome(b"hellp", b"theta", &params).unwrap());
    }

    #[test]
    fn theta_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = choose_theta(b"m", ThetaMode::Deterministic, &mut rng);
        assert_eq!(d, choose_theta(b"m", ThetaMode::Deterministic, &mut rng));
        assert_ne!(d, choose_theta(b"n", ThetaMode::Deterministic, &mut rng));
        let a = choose_theta(b"m", ThetaMode::Randomized, &mut rng);
        assert_ne!(a, choose_theta(b"m", ThetaMode::Randomized, &mut rng));
        assert_eq!(a.len(), THETA_LEN);
    }

    #[test]
    fn full_weight_syndrome_terminates() {
        let mut params = builtin("desk").unwrap();
        params.p = 1;
        params.w = 10;
        let s = derive_syndrome(b"x", b"", &params).unwrap();
        assert_eq!(s.weight(), 10);
    }

    #[test]
    fn positions_are_uniform() {
        let params = builtin("desk").unwrap();
        let r = params.r();
        let trials = 100_000u32;
        let mut counts = vec![0u32; r];
        for t in 0..trials {
            for j in derive_syndrome(&t.to_le_bytes(), b"u", &params)
                .unwrap()
                .support()
            {
                counts[j] += 1;
            }
        }
        let pr = params.w as f64 / r as f64;
        let sd = (trials as f64 * pr * (1.0 - pr)).sqrt();
        let expect = trials as f64 * pr;
        for (j, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - expect).abs() < 4.0 * sd,
                "position {j}: {c} vs {expect}"
            );
        }
    }
}
