#![no_main]

use fpp_core::harness::{encode_rows, read_rows, COLUMNS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_rows(data) {
        // Anything that parses must survive a round trip.
        let mut bytes = format!("{}\n", COLUMNS.join(",")).into_bytes();
        bytes.extend(encode_rows(&rows).expect("encode parsed rows"));
        let again = read_rows(bytes.as_slice()).expect("reread encoded rows");
        assert_eq!(rows.len(), again.len());
    }
});
