#![no_main]

use isoplace::manager::parse_events;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(events) = parse_events(text) {
        assert!(events.windows(2).all(|w| w[0].seq < w[1].seq));
        let rendered: String = events.iter().map(|e| format!("{e}\n")).collect();
        assert_eq!(parse_events(&rendered).expect("re-parse"), events);
    }
});
