#![no_main]

use libfuzzer_sys::fuzz_target;
use spanse::ParameterSet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = ParameterSet::from_toml(s) {
        assert!(p.validate().is_ok());
        assert_eq!(ParameterSet::from_toml(&p.to_toml()).unwrap(), p);
        assert_eq!(ParameterSet::from_bytes(&p.to_bytes()).unwrap(), p);
    }
});
