#![no_main]

use libfuzzer_sys::fuzz_target;
use spanse::PublicKey;

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = PublicKey::from_bytes(data) {
        let again = PublicKey::from_bytes(&x.to_bytes()).expect("re-encoded object decodes");
        assert!(again == x);
    }
});
