#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_presheaf;

fuzz_target!(|data: &[u8]| {
    let _ = parse_presheaf(data);
});
