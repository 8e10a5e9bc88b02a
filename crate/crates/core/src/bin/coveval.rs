fn main() {
    std::process::exit(coveval::cli::run(std::env::args_os()));
}
