#![no_main]

use isoplace::experiment::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_text(text) {
        assert!(!cfg.capacities.is_empty() && !cfg.seeds.is_empty() && !cfg.solvers.is_empty());
        cfg.validate().expect("parsed configs validate");
    }
});
