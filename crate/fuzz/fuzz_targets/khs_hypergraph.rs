#![no_main]

use hornlab::io::{hypergraph_to_json, parse_hypergraph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(h) = parse_hypergraph(text) else { return };
    let back = parse_hypergraph(&hypergraph_to_json(&h)).expect("serialised hypergraph must parse");
    assert_eq!(h, back);
});
