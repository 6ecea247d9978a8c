#![no_main]

use fewopt::format::{parse_quartic, InstanceFile};
use fewopt::harness::{make_hardness_instance, HardnessMode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 4096 {
        return;
    }
    let Ok(p) = parse_quartic(s) else { return };
    let back = parse_quartic(&InstanceFile::from_sparse_poly(&p).to_json()).expect("reparses");
    assert_eq!(back, p);
    if p.nvars() <= 3 && p.num_terms() <= 8 {
        let _ = make_hardness_instance(&p, 0.5, Some(3), HardnessMode::PositiveOrthant);
    }
});
