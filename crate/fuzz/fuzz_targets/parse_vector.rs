#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_vector;

fuzz_target!(|data: &[u8]| {
    let _ = parse_vector(data);
});
