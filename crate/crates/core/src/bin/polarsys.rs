fn main() {
    std::process::exit(polarsys::cli::run(std::env::args_os()));
}
