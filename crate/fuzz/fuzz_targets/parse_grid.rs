#![no_main]

use libfuzzer_sys::fuzz_target;
use semiquat::config::parse_grid;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_grid(text) {
            assert!(grid.min < grid.max && grid.count >= 2);
            assert_eq!(parse_grid(&grid.to_string()).expect("display parses"), grid);
        }
    }
});
