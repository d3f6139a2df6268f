#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(op) = pbclab::io::parse_operator(text) {
        // whatever parses must survive a writer/reader roundtrip unchanged
        let written = pbclab::io::write_operator(&op);
        let back = pbclab::io::parse_operator(&written).expect("roundtrip");
        assert_eq!(written, pbclab::io::write_operator(&back));
    }
    let _ = pbclab::io::parse_density(text);
});
