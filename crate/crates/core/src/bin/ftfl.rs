fn main() {
    std::process::exit(ftfl::cli::run(std::env::args_os()));
}
