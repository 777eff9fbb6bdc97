#![no_main]

use libfuzzer_sys::fuzz_target;
use meanscope::hansen::{hansen_eval, HansenDensity};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = HansenDensity::from_json(text) {
        let back = HansenDensity::from_json(&h.to_json()).expect("serialized density reparses");
        assert_eq!(back, h);
        let _ = hansen_eval(&h, 2.0);
    }
});
