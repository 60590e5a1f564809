#![no_main]

use libfuzzer_sys::fuzz_target;
use semiquat::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::from_json(text) {
            // Accepted configs must echo to JSON that parses back to the same value.
            let echo = serde_json::to_string(&cfg).expect("config serializes");
            assert_eq!(RunConfig::from_json(&echo).expect("echo parses"), cfg);
        }
    }
});
