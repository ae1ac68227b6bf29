#![no_main]

use hornlab_cli::parse_replay;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((args, _stdin)) = parse_replay(text) {
        assert!(!args.iter().any(|a| a == "--replay"));
    }
});
