use bdcover::suites::{run_suite, SUITES};

fn run(name: &str) {
    let iters = std::env::var("BDCOVER_SUITE_ITERS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(12);
    let t = std::time::Instant::now();
    let r = run_suite(name, 7, iters).unwrap();
    eprintln!(
        "{name}: {} passed, {} failed in {:.2?}",
        r.passed,
        r.failed,
        t.elapsed()
    );
    assert_eq!(r.failed, 0, "{:?}", r.first_counterexample);
    assert!(r.passed > 0);
}

macro_rules! suite_tests {
    ($($name:ident),*) => {$(
        #[test]
        fn $name() {
            run(stringify!($name));
        }
    )*};
}

suite_tests!(
    localfield,
    hilbert,
    weil,
    etale,
    cover,
    good,
    calibration,
    transfer,
    dagger,
    moment_map,
    product_formula
);

#[test]
fn every_suite_is_listed() {
    for n in SUITES {
        assert!(run_suite(n, 1, 1).is_some());
    }
    assert!(run_suite("nope", 1, 1).is_none());
}
