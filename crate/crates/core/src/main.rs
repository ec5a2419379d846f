fn main() {
    std::process::exit(iontrap_unruh::cli::run(std::env::args_os()));
}
