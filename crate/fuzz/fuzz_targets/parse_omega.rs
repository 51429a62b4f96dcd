#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // omega tokens and scan specs must never panic on any input
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = kicked_top_cli::parse::parse_omega(s);
        let _ = kicked_top_cli::parse::parse_omega_scan(s);
    }
});
