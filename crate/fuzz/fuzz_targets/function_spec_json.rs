#![no_main]

use libfuzzer_sys::fuzz_target;
use meanscope::config::FunctionSpec;
use meanscope::means::PositiveFunction;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = FunctionSpec::from_json(text) else { return };
    if let Ok(f) = spec.build() {
        let _ = f.eval(0.5);
        let _ = f.log_eval(3.0);
    }
});
