#![no_main]

use bdcover::cli::run_args;
use libfuzzer_sys::fuzz_target;

// One argument per line. `selftest` is skipped: it is a long batch job.
fuzz_target!(|s: &str| {
    let args: Vec<String> = s.lines().map(str::to_owned).collect();
    if args.first().is_some_and(|a| a == "selftest") {
        return;
    }
    let _ = run_args(std::iter::once("bdcover".to_owned()).chain(args));
});
