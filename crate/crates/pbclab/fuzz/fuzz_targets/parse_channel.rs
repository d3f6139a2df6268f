#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ch) = pbclab::io::parse_channel(text) {
        let written = pbclab::io::write_channel(&ch);
        let back = pbclab::io::parse_channel(&written).expect("roundtrip");
        assert_eq!(written, pbclab::io::write_channel(&back));
    }
});
