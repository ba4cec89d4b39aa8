#![no_main]

use libfuzzer_sys::fuzz_target;
use walsh_prep::StateVector;

fuzz_target!(|data: &[u8]| {
    if let Ok(state) = StateVector::from_binary_bytes(data) {
        // accepted input must survive a write/read round trip unchanged
        let mut buf = Vec::new();
        state.write_binary(&mut buf).unwrap();
        assert_eq!(buf, data);
        let again = StateVector::from_binary_bytes(&buf).unwrap();
        assert_eq!(state.n_qubits(), again.n_qubits());
    }
});
