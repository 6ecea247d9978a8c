#![no_main]

use fewopt::format::parse_instance;
use fewopt::{sup, PrecisionBudget};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 2048 {
        return;
    }
    let Ok(budget) = PrecisionBudget::new(128, 512, 1e-12) else { return };
    let Ok(f) = parse_instance(s, budget.mantissa) else { return };
    if f.n() > 4 {
        return;
    }
    let _ = sup(&f, &budget);
});
