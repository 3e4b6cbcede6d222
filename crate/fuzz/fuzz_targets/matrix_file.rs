#![no_main]

use bc_canon::io::{parse_matrix_bytes, parse_matrix_str};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let from_bytes = parse_matrix_bytes(data);
    if let Ok(text) = std::str::from_utf8(data) {
        let from_str = parse_matrix_str(text);
        assert_eq!(from_bytes.is_ok(), from_str.is_ok());
    }
    if let Ok(m) = from_bytes {
        assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
});
