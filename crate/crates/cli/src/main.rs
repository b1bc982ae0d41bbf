fn main() {
    std::process::exit(nuclear_range_cli::run(std::env::args_os()));
}
