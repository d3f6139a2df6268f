#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = pbclab::io::parse_hyptest(text) {
        let written = pbclab::io::write_hyptest(&v);
        let back = pbclab::io::parse_hyptest(&written).expect("roundtrip");
        assert_eq!(written, pbclab::io::write_hyptest(&back));
    }
});
