#![no_main]

use fpp_core::harness::ExperimentSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = ExperimentSpec::from_json(text) {
        // Validation must report problems, never panic.
        let _ = spec.validate();
        let _ = spec.parsed_directions();
        assert_eq!(spec.experiment_id().len(), 64);
    }
});
