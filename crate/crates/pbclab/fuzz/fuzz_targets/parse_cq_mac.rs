#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mac) = pbclab::io::parse_cq_mac(text) {
        let written = pbclab::io::write_cq_mac(&mac);
        let back = pbclab::io::parse_cq_mac(&written).expect("roundtrip");
        assert_eq!(written, pbclab::io::write_cq_mac(&back));
    }
});
