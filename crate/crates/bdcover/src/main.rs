fn main() {
    std::process::exit(bdcover::cli::dispatch(std::env::args()));
}
