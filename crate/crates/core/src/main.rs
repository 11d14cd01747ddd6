fn main() {
    std::process::exit(csakit::cli::run(std::env::args_os()));
}
