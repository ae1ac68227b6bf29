#![no_main]

use std::sync::LazyLock;

use hornlab::efgame::{build_instance, format_move, parse_spoiler_move, GameInstance};
use hornlab::io::parse_kstructure;
use libfuzzer_sys::fuzz_target;

// the 5-cycle as a binary structure: small enough to build once, large enough to have S elements
static INSTANCE: LazyLock<GameInstance> = LazyLock::new(|| {
    let text = r#"{"format":"khs-1","kind":"kstructure","k":2,"universe":["0","1","2","3","4"],
        "tuples":[["0","1"],["1","0"],["1","2"],["2","1"],["2","3"],["3","2"],["3","4"],["4","3"],["4","0"],["0","4"]]}"#;
    let base = parse_kstructure(text).expect("fixed base parses");
    build_instance(&base, 1, 5, true).expect("fixed instance builds")
});

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(mv) = parse_spoiler_move(&INSTANCE, text) else {
        return;
    };
    assert!(mv.element < INSTANCE.side_len(mv.side));
    let canonical = format!("{} {}", mv.side, mv.element);
    assert_eq!(
        parse_spoiler_move(&INSTANCE, &canonical).expect("canonical move parses"),
        mv
    );
    let annotated = format_move(&INSTANCE, mv);
    assert_eq!(
        parse_spoiler_move(&INSTANCE, &annotated).expect("formatted move parses"),
        mv
    );
});
