fn main() {
    std::process::exit(kplex_cli::run(std::env::args_os()));
}
