#![no_main]

use isoplace::{greedy_place, is_feasible, GreedyMode, Instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(inst) = Instance::from_text(text) else {
        return;
    };
    assert_eq!(Instance::from_text(&inst.to_text()).expect("re-parse"), inst);

    // Parsed instances are valid solver input.
    let res = greedy_place(&inst, GreedyMode::ROLLBACK);
    assert!(is_feasible(&inst, &res.placed));
});
