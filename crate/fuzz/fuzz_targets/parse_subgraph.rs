#![no_main]

use libfuzzer_sys::fuzz_target;
use sheafwork::io::parse_subgraph;
use sheafwork::modal::DirectedMultigraph;

fuzz_target!(|data: &[u8]| {
    let g = DirectedMultigraph::new(&["a", "b", "c"], &[("ab", "a", "b"), ("bc", "b", "c"), ("cc", "c", "c")]).unwrap();
    let _ = parse_subgraph(&g, data);
});
