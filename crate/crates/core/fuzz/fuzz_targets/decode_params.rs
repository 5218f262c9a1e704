#![no_main]

use libfuzzer_sys::fuzz_target;
use spanse::ParameterSet;

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = ParameterSet::from_bytes(data) {
        let again = ParameterSet::from_bytes(&x.to_bytes()).expect("re-encoded object decodes");
        assert!(again == x);
    }
});
