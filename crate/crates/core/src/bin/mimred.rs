fn main() {
    std::process::exit(mimred::cli::run(std::env::args_os()));
}
