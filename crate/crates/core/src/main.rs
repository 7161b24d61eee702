fn main() {
    std::process::exit(wigner::cli::run_from_args());
}
