#![no_main]

use bdcover::etale::QuadEtale;
use bdcover::literal::{parse_element, parse_etale, parse_matrix, split_list};
use bdcover::localfield::{LocalField, SquareClass};
use libfuzzer_sys::fuzz_target;

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

// First byte picks the prime and the algebra, the rest is the literal.
fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(s) = std::str::from_utf8(rest) else { return };
    let p = PRIMES[sel as usize % PRIMES.len()];
    let f = LocalField::base(p, 16).unwrap();
    let k = match (sel / 5) % 4 {
        0 => QuadEtale::split(f),
        1 => QuadEtale::field(f, SquareClass::U).unwrap(),
        2 => QuadEtale::field(f, SquareClass::P).unwrap(),
        _ => QuadEtale::field(f, SquareClass::UP).unwrap(),
    };
    for part in split_list(s) {
        let _ = parse_element(f, part);
        let _ = parse_etale(&k, part);
        let _ = parse_matrix(f, part);
        if let Some(kf) = k.ext() {
            let _ = parse_element(kf, part);
        }
    }
});
