fn main() {
    std::process::exit(tic::cli::run_from_args(std::env::args_os()));
}
