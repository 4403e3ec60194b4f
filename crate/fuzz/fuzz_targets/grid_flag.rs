#![no_main]

use libfuzzer_sys::fuzz_target;
use qnd_cli::Grid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = text.parse::<Grid>() {
        if grid.len() <= 4096 {
            assert_eq!(grid.values().len(), grid.len());
        }
    }
});
