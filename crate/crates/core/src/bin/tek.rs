fn main() {
    std::process::exit(tek::cli::run(std::env::args_os()));
}
