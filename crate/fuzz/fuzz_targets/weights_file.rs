#![no_main]

use colheat::weights_file::{parse, parse_entries};
use colheat::SpinEnsemble;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_entries(text);
    for (n, two_s) in [(2, 1), (3, 3), (10, 1)] {
        let e = SpinEnsemble::new(n, two_s).unwrap();
        if let Ok(w) = parse(text, &e) {
            let total: f64 = w.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
});
