fn main() {
    std::process::exit(moldsched_cli::run_cli(std::env::args_os()));
}
