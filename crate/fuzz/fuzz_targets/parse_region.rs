#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = kicked_top_cli::parse::parse_region(s);
        let _ = kicked_top_cli::parse::parse_resolution(s);
        let _ = kicked_top_cli::parse::parse_mu_grid(s);
    }
});
