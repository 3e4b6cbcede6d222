#![no_main]

use bc_canon::Tolerances;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(tol) = text.parse::<Tolerances>() {
        tol.validate().expect("parsed tolerances must validate");
    }
});
