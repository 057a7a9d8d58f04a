fn main() {
    std::process::exit(scenforge::cli::run(std::env::args_os()));
}
