#![no_main]

use libfuzzer_sys::fuzz_target;
use spanse::DensityPolynomial;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    for d in [
        DensityPolynomial::parse(s),
        DensityPolynomial::parse_with_residual(s),
    ]
    .into_iter()
    .flatten()
    {
        let total: f64 = d.terms().iter().map(|t| t.fraction()).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let _ = d.sampler();
    }
});
