#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(state) = walsh_prep::datasets::parse_amplitudes(text) {
            // accepted input must produce a normalized real state
            assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
            assert!(state.amplitudes().iter().all(|a| a.im == 0.0 && a.re >= 0.0));
        }
    }
});
