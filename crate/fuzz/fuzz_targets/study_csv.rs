#![no_main]

use libfuzzer_sys::fuzz_target;
use quadcurl_cli::{emit_plot, read_study_csv, write_study_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = read_study_csv(text) {
        let again = read_study_csv(&write_study_csv(&rows)).expect("re-reading a written study");
        assert_eq!(again, rows);
        let _ = emit_plot(&rows);
    }
});
