#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_complex;

fuzz_target!(|data: &[u8]| {
    let _ = parse_complex(data);
});
