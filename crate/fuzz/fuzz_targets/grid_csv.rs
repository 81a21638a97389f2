#![no_main]
use libfuzzer_sys::fuzz_target;
use dra_synth::pattern::PatternGrid;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = PatternGrid::from_csv(text);
    }
});
