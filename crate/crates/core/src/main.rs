fn main() {
    std::process::exit(qgamma::cli::run(std::env::args_os()));
}
