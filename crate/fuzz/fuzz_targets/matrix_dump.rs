#![no_main]

use libfuzzer_sys::fuzz_target;
use quadcurl::sparse::CsrMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = CsrMatrix::read_dump(text) {
        let again = CsrMatrix::read_dump(&a.write_dump()).expect("re-reading a written dump");
        assert_eq!(again.nrows(), a.nrows());
        assert_eq!(again.ncols(), a.ncols());
        assert_eq!(again.nnz(), a.nnz());
    }
});
