#![no_main]

use hornlab::io::{hypergraph_to_json, kstructure_to_json, parse_document, Document};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_document(text) else { return };
    // every accepted document survives a write and re-read unchanged
    let written = match &doc {
        Document::Hypergraph(h) => hypergraph_to_json(h),
        Document::KStructure(s) => kstructure_to_json(s),
    };
    let again = parse_document(&written).expect("serialised document must parse");
    let rewritten = match &again {
        Document::Hypergraph(h) => hypergraph_to_json(h),
        Document::KStructure(s) => kstructure_to_json(s),
    };
    assert_eq!(written, rewritten);
});
