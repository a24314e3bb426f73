#![no_main]

use fpp_core::harness::Checkpoint;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = Checkpoint::<Option<u32>>::decode(data);
    let _ = Checkpoint::<Option<[u32; 3]>>::decode(data);
    let _ = Checkpoint::<Option<bool>>::decode(data);
});
