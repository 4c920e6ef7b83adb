#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_structuring_element;

fuzz_target!(|data: &[u8]| {
    let _ = parse_structuring_element(data);
});
