fn main() {
    std::process::exit(exitmoments_cli::run(std::env::args_os()));
}
