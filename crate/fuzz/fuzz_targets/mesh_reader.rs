#![no_main]

use libfuzzer_sys::fuzz_target;
use quadcurl::mesh::{read_mesh, write_mesh};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mesh) = read_mesh(text) {
        // anything accepted must survive a write/read round trip
        let again = read_mesh(&write_mesh(&mesh)).expect("re-reading a written mesh");
        assert_eq!(again.vertices, mesh.vertices);
        assert_eq!(again.n_cells(), mesh.n_cells());
    }
});
