#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_sheaf;

fuzz_target!(|data: &[u8]| {
    let _ = parse_sheaf(data);
});
