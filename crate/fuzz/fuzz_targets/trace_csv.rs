#![no_main]
use libfuzzer_sys::fuzz_target;
use vtolverify::vehicle;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = vehicle::parse_trace_csv(text);
    }
});
