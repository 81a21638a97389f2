#![no_main]
use libfuzzer_sys::fuzz_target;
use dra_synth::pattern::{measure_cut, CutPlane, PatternCut};

fuzz_target!(|data: &str| {
    for plane in [CutPlane::Azimuth, CutPlane::Elevation] {
        if let Ok(cut) = PatternCut::from_csv(plane, data) {
            let _ = measure_cut(&cut);
        }
    }
});
