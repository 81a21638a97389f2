#![no_main]
use libfuzzer_sys::fuzz_target;
use dra_synth::scenario::ScenarioFile;

fuzz_target!(|data: &str| {
    // loading includes validation and visibility checks; neither may panic
    let _ = ScenarioFile::from_json(data, "fuzz");
});
