#![no_main]

use libfuzzer_sys::fuzz_target;
use qnd_cli::{validate, RunSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = RunSpec::from_config_text(text) {
        if validate(&spec).is_empty() {
            // resolution must keep a valid spec valid, and survive a TOML round trip
            let resolved = spec.resolved();
            assert!(validate(&resolved).is_empty());
            let again = RunSpec::from_toml_str(&resolved.to_toml_string()).unwrap();
            assert_eq!(again.to_toml_string(), resolved.to_toml_string());
        }
    }
});
