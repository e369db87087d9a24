fn main() {
    std::process::exit(riskorder::cli::run(std::env::args_os()));
}
