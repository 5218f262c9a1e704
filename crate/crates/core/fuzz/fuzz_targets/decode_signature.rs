#![no_main]

use libfuzzer_sys::fuzz_target;
use spanse::Signature;

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = Signature::from_bytes(data) {
        let again = Signature::from_bytes(&x.to_bytes()).expect("re-encoded object decodes");
        assert!(again == x);
    }
});
