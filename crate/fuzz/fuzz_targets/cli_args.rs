#![no_main]

use bc_canon_cli::{parse_args, resolve_tolerances};
use libfuzzer_sys::fuzz_target;

// Arguments are NUL-separated; the first one doubles as the BC_CANON_TOL value.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut parts = text.split('\0');
    let env = parts.next();
    let argv: Vec<&str> = std::iter::once("bc-canon").chain(parts).collect();
    if let Ok(cli) = parse_args(argv) {
        let _ = resolve_tolerances(cli.tol, env);
    }
});
