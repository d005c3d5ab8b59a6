#![no_main]

use libfuzzer_sys::fuzz_target;
use maslov_cli::ExperimentSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = ExperimentSpec::from_json(text) {
        // Accepted specs survive a serialize/parse round trip unchanged.
        let json = serde_json::to_string(&spec).unwrap();
        let back = ExperimentSpec::from_json(&json).unwrap();
        assert_eq!(back, spec);
        let _ = spec.build_chart();
    }
});
