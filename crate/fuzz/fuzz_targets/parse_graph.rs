#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_graph;

fuzz_target!(|data: &[u8]| {
    let _ = parse_graph(data);
});
