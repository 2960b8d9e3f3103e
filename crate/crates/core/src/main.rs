fn main() {
    std::process::exit(mcbound::cli::run(std::env::args_os()));
}
