#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Err(e) = kmrep::spec_file::parse_chain_spec(text) {
            assert!(!e.to_string().is_empty());
        }
    }
});
