#![no_main]

use bdcover::literal::parse_rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok((n, d)) = parse_rational(s) {
        assert_ne!(d, 0);
        let again = parse_rational(&format!("{n}/{d}")).unwrap();
        assert_eq!(again, (n, d));
    }
});
