#![no_main]

use hnls::checkpoint::{decode, encode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ck) = decode(data) {
        // The header JSON need not be canonical, so compare decoded values.
        let again = decode(&encode(&ck.field, &ck.header)).expect("re-encoded checkpoint decodes");
        assert_eq!(again.header, ck.header);
        let same = again.field.coeffs().iter().zip(ck.field.coeffs()).all(|(a, b)| {
            a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
        });
        assert!(same);
    }
});
