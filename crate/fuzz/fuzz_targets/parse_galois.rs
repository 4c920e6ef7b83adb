#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_galois;

fuzz_target!(|data: &[u8]| {
    let _ = parse_galois(data);
});
