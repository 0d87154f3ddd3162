#![no_main]
use libfuzzer_sys::fuzz_target;
use vtolverify::scenarios::ScenarioConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ScenarioConfig::from_json_str(text) {
        // anything accepted must survive a round trip
        let again = ScenarioConfig::from_json_str(&cfg.to_json()).expect("re-parse");
        assert_eq!(again, cfg);
    }
});
