fn main() {
    std::process::exit(sfqrm::cli::run(std::env::args_os()));
}
