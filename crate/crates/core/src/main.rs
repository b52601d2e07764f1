fn main() {
    std::process::exit(periodic_ns::cli::main_with_args(std::env::args()));
}
