#![no_main]

use colheat_cli::args::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(entries) = parse_config(text) {
        assert!(entries.iter().all(|(k, v)| !k.is_empty() && !v.is_empty() && !k.contains('_')));
    }
});
