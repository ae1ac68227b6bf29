#![no_main]

use hornlab::io::{kstructure_to_json, parse_kstructure};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(s) = parse_kstructure(text) else { return };
    let back = parse_kstructure(&kstructure_to_json(&s)).expect("serialised structure must parse");
    assert_eq!(s, back);
});
