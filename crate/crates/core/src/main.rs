fn main() {
    std::process::exit(tubecenter::cli::run(std::env::args_os()));
}
