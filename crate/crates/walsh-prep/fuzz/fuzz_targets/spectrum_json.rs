#![no_main]

use libfuzzer_sys::fuzz_target;
use walsh_prep::WalshSpectrum;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spectrum) = WalshSpectrum::from_json_str(text) {
            // accepted input must survive a serialize/parse round trip
            let json = spectrum.to_json().to_string();
            let again = WalshSpectrum::from_json_str(&json).unwrap();
            assert_eq!(spectrum.n_qubits, again.n_qubits);
            assert_eq!(spectrum.len(), again.len());
        }
    }
});
