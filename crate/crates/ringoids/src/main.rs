fn main() {
    std::process::exit(ringoids::cli::run(std::env::args_os()));
}
