#![no_main]

use libfuzzer_sys::fuzz_target;
use meanscope::matmean::{matrix_from_json, matrix_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = matrix_from_json(text) {
        let back = matrix_from_json(&matrix_to_json(&m)).expect("written matrix reparses");
        assert_eq!(back.entries(), m.entries());
    }
});
