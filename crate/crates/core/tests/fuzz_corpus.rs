//! Replays the checked-in fuzz seeds, and cheap mutations of them, through
//! the same checks as the fuzz targets so they run on stable.

use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanse::{DensityPolynomial, ParameterSet, PrivateKey, PublicKey, Signature};

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    assert!(!seeds.is_empty(), "no seeds in {}", dir.display());
    seeds.sort();
    seeds
}

fn mutations(seed: &[u8], rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<u8>> {
    let mut out = vec![seed.to_vec()];
    for _ in 0..count {
        let mut m = seed.to_vec();
        match rng.random_range(0..4) {
            0 if !m.is_empty() => m.truncate(rng.random_range(0..m.len())),
            1 => m.push(rng.random()),
            _ if !m.is_empty() => {
                let i = rng.random_range(0..m.len());
                m[i] = rng.random();
            }
            _ => m.push(b'0'),
        }
        out.push(m);
    }
    out
}

macro_rules! decode_target {
    ($name:ident, $target:literal, $ty:ty) => {
        #[test]
        fn $name() {
            let mut rng = ChaCha8Rng::seed_from_u64(stringify!($name).len() as u64);
            for seed in corpus($target) {
                assert!(<$ty>::from_bytes(&seed).is_ok());
                for data in mutations(&seed, &mut rng, 200) {
                    if let Ok(x) = <$ty>::from_bytes(&data) {
                        let again = <$ty>::from_bytes(&x.to_bytes()).unwrap();
                        assert!(again == x);
                    }
                }
            }
        }
    };
}

decode_target!(params_seeds, "decode_params", ParameterSet);
decode_target!(public_seeds, "decode_public", PublicKey);
decode_target!(private_seeds, "decode_private", PrivateKey);
decode_target!(signature_seeds, "decode_signature", Signature);

#[test]
fn density_seeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in corpus("parse_density") {
        let s = String::from_utf8(seed.clone()).unwrap();
        assert!(
            DensityPolynomial::parse(&s).is_ok()
                || DensityPolynomial::parse_with_residual(&s).is_ok(),
            "{s}"
        );
        for data in mutations(&seed, &mut rng, 300) {
            let Ok(s) = std::str::from_utf8(&data) else {
                continue;
            };
            for d in [
                DensityPolynomial::parse(s),
                DensityPolynomial::parse_with_residual(s),
            ]
            .into_iter()
            .flatten()
            {
                let total: f64 = d.terms().iter().map(|t| t.fraction()).sum();
                assert!((total - 1.0).abs() < 1e-9, "{s}");
            }
        }
    }
}

#[test]
fn params_toml_seeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for seed in corpus("parse_params_toml") {
        let s = String::from_utf8(seed.clone()).unwrap();
        assert!(ParameterSet::from_toml(&s).is_ok(), "{s}");
        for data in mutations(&seed, &mut rng, 300) {
            let Ok(s) = std::str::from_utf8(&data) else {
                continue;
            };
            if let Ok(p) = ParameterSet::from_toml(s) {
                assert!(p.validate().is_ok());
                assert_eq!(ParameterSet::from_toml(&p.to_toml()).unwrap(), p);
                assert_eq!(ParameterSet::from_bytes(&p.to_bytes()).unwrap(), p);
            }
        }
    }
}
