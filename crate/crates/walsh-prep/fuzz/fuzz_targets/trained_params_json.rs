#![no_main]

use libfuzzer_sys::fuzz_target;
use walsh_prep::cli::{build_circuit, TrainedParams};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(params) = serde_json::from_str::<TrainedParams>(text) {
            // synthesis must fail cleanly or yield a well-formed gate list
            if let Ok(gates) = build_circuit(&params) {
                let counts = walsh_prep::circuit::count_gates(&gates);
                assert_eq!(
                    counts.one_qubit + counts.two_qubit,
                    gates.gates().len()
                );
            }
        }
    }
});
