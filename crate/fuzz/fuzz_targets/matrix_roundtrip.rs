#![no_main]

use bc_canon::io::{matrix_to_json, parse_matrix_bytes, parse_matrix_str};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = parse_matrix_bytes(data) else { return };
    let text = matrix_to_json(&m);
    let back = parse_matrix_str(&text).expect("serialized matrix must parse");
    assert_eq!(back.shape(), m.shape());
    for (x, y) in back.iter().zip(m.iter()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
    assert_eq!(matrix_to_json(&back), text);
});
