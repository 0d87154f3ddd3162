#![no_main]
use libfuzzer_sys::fuzz_target;
use vtolverify::reach::Reachtube;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(tube) = Reachtube::from_jsonl_str(text) {
        assert!(!tube.is_empty());
        let back = Reachtube::from_jsonl_str(&tube.to_jsonl()).expect("re-parse");
        assert_eq!(back.slices, tube.slices);
    }
});
