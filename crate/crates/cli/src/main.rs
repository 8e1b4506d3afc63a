fn main() {
    std::process::exit(paretoscore::cli::run(std::env::args_os()));
}
