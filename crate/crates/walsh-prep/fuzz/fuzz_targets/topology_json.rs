#![no_main]

use libfuzzer_sys::fuzz_target;
use walsh_prep::TopologyGraph;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(graph) = serde_json::from_str::<TopologyGraph>(text) {
            // re-validation through the constructor (the CLI's file: path)
            // must not panic; accepted graphs keep their edges normalized
            if let Ok(valid) = TopologyGraph::new(graph.n_qubits, graph.edges().to_vec()) {
                assert!(valid
                    .edges()
                    .iter()
                    .all(|&(a, b)| a < b && (b as u64) < u64::from(valid.n_qubits)));
            }
        }
    }
});
