fn main() {
    std::process::exit(symbinom::cli::run(std::env::args_os()));
}
