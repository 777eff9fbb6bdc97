#![no_main]

use libfuzzer_sys::fuzz_target;
use meanscope::matmean::{matrix_from_text, matrix_to_text};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = matrix_from_text(text) {
        let back = matrix_from_text(&matrix_to_text(&m)).expect("written matrix reparses");
        assert_eq!(back.entries(), m.entries());
    }
});
