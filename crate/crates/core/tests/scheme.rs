use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use spanse::scheme::{object_kind, sign_counted, ObjectKind, RejectReason, ThetaMode};
use spanse::{
    builtin, keygen, sign, verify, Error, ParameterSet, PrivateKey, PublicKey, Signature,
};

#[test]
fn keys_and_signature_survive_files() {
    let params = builtin("desk").unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    let (sk, pk) = keygen(&params, &mut rng).unwrap();
    let sk = PrivateKey::from_bytes(&sk.to_bytes()).unwrap();
    let pk_bytes = pk.to_bytes();
    assert_eq!(object_kind(&pk_bytes).unwrap(), ObjectKind::PublicKey);
    let pk = PublicKey::from_bytes(&pk_bytes).unwrap();
    let sig = sign(&sk, b"file", ThetaMode::Randomized, &mut rng).unwrap();
    let sig = Signature::from_bytes(&sig.to_bytes()).unwrap();
    assert_eq!(verify(&pk, b"file", &sig), Ok(()));
}

#[test]
fn reloaded_private_key_signs_identically() {
    let params = builtin("desk").unwrap();
    let (sk, _) = keygen(&params, &mut ChaCha20Rng::seed_from_u64(22)).unwrap();
    let reloaded = PrivateKey::from_bytes(&sk.to_bytes()).unwrap();
    let a = sign(
        &sk,
        b"m",
        ThetaMode::Deterministic,
        &mut ChaCha20Rng::seed_from_u64(1),
    );
    let b = sign(
        &reloaded,
        b"m",
        ThetaMode::Deterministic,
        &mut ChaCha20Rng::seed_from_u64(1),
    );
    assert_eq!(a.unwrap(), b.unwrap());
}

#[test]
fn params_from_toml_drive_the_scheme() {
    let text = "q = 31\np = 7\nn0 = 6\nk0 = 3\nw = 4\nw_g = 3\nm_g = 2\n\
                density = \"0:1/2,1:1/2\"\n";
    let params = ParameterSet::from_toml(text).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    let (sk, pk) = keygen(&params, &mut rng).unwrap();
    for i in 0..50u32 {
        let msg = i.to_le_bytes();
        let sig = sign(&sk, &msg, ThetaMode::Randomized, &mut rng).unwrap();
        assert_eq!(sig.sigma().len(), params.n());
        assert_eq!(verify(&pk, &msg, &sig), Ok(()));
    }
}

#[test]
fn signature_under_other_params_is_rejected() {
    let mut rng = ChaCha20Rng::seed_from_u64(24);
    let (sk, _) = keygen(&builtin("desk").unwrap(), &mut rng).unwrap();
    let (_, other_pk) = keygen(&builtin("desk-2x").unwrap(), &mut rng).unwrap();
    let sig = sign(&sk, b"m", ThetaMode::Deterministic, &mut rng).unwrap();
    assert_eq!(
        verify(&other_pk, b"m", &sig),
        Err(RejectReason::ParameterMismatch)
    );
}

#[test]
fn heavy_density_reports_attempt_cap() {
    let mut params = builtin("desk").unwrap();
    params.density = spanse::DensityPolynomial::parse("0.98,0.02").unwrap();
    params.max_sign_attempts = 3;
    let mut rng = ChaCha20Rng::seed_from_u64(25);
    let (sk, _) = keygen(&params, &mut rng).unwrap();
    match sign_counted(&sk, b"m", ThetaMode::Deterministic, &mut rng) {
        Err(Error::SignAttemptsExhausted { attempts }) => assert_eq!(attempts, 3),
        other => panic!("expected exhaustion, got {other:?}"),
    }
}
