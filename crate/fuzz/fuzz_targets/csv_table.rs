#![no_main]

use libfuzzer_sys::fuzz_target;
use qnd_cli::{OutputTable, RunSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = RunSpec::from_metadata(text);
    if let Ok(table) = OutputTable::parse(text) {
        assert!(table.rows.iter().all(|r| r.len() == table.columns.len()));
        let reparsed = OutputTable::parse(&table.to_csv()).unwrap();
        assert_eq!(reparsed.columns, table.columns);
        assert_eq!(reparsed.rows.len(), table.rows.len());
    }
});
