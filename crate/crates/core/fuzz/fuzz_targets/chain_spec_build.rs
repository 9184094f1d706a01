#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = kmrep::spec_file::parse_chain_spec(text) else {
        return;
    };
    let Ok(built) = spec.build() else {
        return;
    };
    let rows = built.rows();
    let limit = rows.scalar_size().unwrap_or(16).min(16);
    for s in 0..limit {
        if let Ok(entries) = rows.row_entries(s) {
            assert!(entries
                .iter()
                .all(|(c, v)| v.is_finite() && *c < rows.scalar_size().unwrap_or(usize::MAX)));
        }
    }
});
