#![no_main]

use fewopt::format::{parse_instance, serialize_instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 4096 {
        return;
    }
    if let Ok(f) = parse_instance(s, 128) {
        let g = parse_instance(&serialize_instance(&f), 128).expect("serialized instance reparses");
        assert_eq!(f, g);
    }
});
