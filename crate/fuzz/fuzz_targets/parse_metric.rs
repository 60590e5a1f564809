#![no_main]

use libfuzzer_sys::fuzz_target;
use semiquat::config::MetricSetting;
use semiquat::MetricContext;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(ctx) = serde_json::from_str::<MetricContext>(text) {
            let signs = ctx.ambient_signs();
            assert_eq!(signs.iter().filter(|&&s| s < 0).count(), 2);
        }
        let _ = serde_json::from_str::<MetricSetting>(text);
    }
});
