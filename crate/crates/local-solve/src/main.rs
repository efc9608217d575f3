fn main() {
    std::process::exit(local_solve::cli::run_cli(std::env::args_os()));
}
