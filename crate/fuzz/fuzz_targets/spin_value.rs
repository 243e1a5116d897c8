#![no_main]

use colheat::spin::format_half;
use colheat_cli::args::parse_spin;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(two_s) = parse_spin(text) {
        assert!(two_s > 0);
        assert_eq!(parse_spin(&format_half(two_s)).unwrap(), two_s);
    }
});
