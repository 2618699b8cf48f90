#![no_main]

use hnls::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = RunConfig::parse(text, None) {
        // A parsed config must reparse from its canonical form to the same hash.
        let again = RunConfig::parse(&cfg.canonical(), None).expect("canonical form parses");
        assert_eq!(cfg.hash(), again.hash());
    }
});
