#![no_main]

use isoplace::Topology;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(topo) = Topology::from_text(text) {
        // whatever parses must re-serialize to the same topology
        let again = Topology::from_text(&topo.to_text()).expect("re-parse");
        assert_eq!(again, topo);
    }
});
