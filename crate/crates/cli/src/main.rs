fn main() {
    std::process::exit(mred_cli::run_cli(std::env::args_os()));
}
