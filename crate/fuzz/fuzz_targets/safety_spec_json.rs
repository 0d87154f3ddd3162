#![no_main]
use libfuzzer_sys::fuzz_target;
use vtolverify::safety::SafetySpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = SafetySpec::from_json_str(text) {
        let json = serde_json::to_string(&spec).expect("serialize");
        assert_eq!(SafetySpec::from_json_str(&json).expect("re-parse"), spec);
    }
});
