fn main() {
    std::process::exit(psylex::cli::run(std::env::args_os()));
}
