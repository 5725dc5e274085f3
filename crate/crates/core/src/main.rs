fn main() {
    std::process::exit(radlab::cli::run(std::env::args_os()));
}
