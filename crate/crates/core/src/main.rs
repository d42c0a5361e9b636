fn main() {
    std::process::exit(fairsum::cli::run(std::env::args_os()));
}
