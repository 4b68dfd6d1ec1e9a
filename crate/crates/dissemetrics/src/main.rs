fn main() {
    std::process::exit(dissemetrics::cli::run(std::env::args_os()));
}
