#![no_main]
use libfuzzer_sys::fuzz_target;
use dra_synth::scenario::ResultsTable;

fuzz_target!(|data: &str| {
    if let Ok(table) = ResultsTable::from_csv(data) {
        // whatever parsed must serialize and render without panicking
        let _ = ResultsTable::from_csv(&table.to_csv());
        let _ = table.to_markdown();
    }
});
