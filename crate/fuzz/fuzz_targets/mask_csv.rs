#![no_main]
use libfuzzer_sys::fuzz_target;
use dra_synth::pattern::ActivationMask;

fuzz_target!(|data: &str| {
    if let Ok(mask) = ActivationMask::from_csv(data) {
        let again = ActivationMask::from_csv(&mask.to_csv()).expect("written mask must parse");
        assert_eq!(mask, again);
    }
});
