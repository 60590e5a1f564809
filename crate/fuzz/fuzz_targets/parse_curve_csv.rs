#![no_main]

use libfuzzer_sys::fuzz_target;
use semiquat::config::parse_curve_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(spline) = parse_curve_csv(text) {
            // A parsed spline must evaluate without panicking inside its range.
            let _ = spline.into_curve(None).map(|c| c.position(c.domain().min));
        }
    }
});
