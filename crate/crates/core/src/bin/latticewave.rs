fn main() {
    std::process::exit(latticewave::cli::run_cli(std::env::args_os()));
}
