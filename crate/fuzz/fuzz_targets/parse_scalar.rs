#![no_main]

use fewopt::format::{parse_expr, parse_rational, parse_scalar};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 512 {
        return;
    }
    match parse_expr(s) {
        Ok(e) => {
            if let Ok(q) = parse_rational(s) {
                assert_eq!(e.to_rational(), Some(q));
            }
            let _ = parse_scalar(s, 128);
        }
        Err(_) => assert!(parse_scalar(s, 128).is_err()),
    }
});
