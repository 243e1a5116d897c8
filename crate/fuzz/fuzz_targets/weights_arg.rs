#![no_main]

use colheat_cli::args::WeightsArg;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = text.parse::<WeightsArg>() {
        let _ = w.to_string().parse::<WeightsArg>().unwrap();
    }
});
