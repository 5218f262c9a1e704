#![no_main]

use libfuzzer_sys::fuzz_target;
use spanse::PrivateKey;

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = PrivateKey::from_bytes(data) {
        let again = PrivateKey::from_bytes(&x.to_bytes()).expect("re-encoded object decodes");
        assert!(again == x);
    }
});
