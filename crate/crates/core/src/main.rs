fn main() {
    std::process::exit(periodic_nls::cli::run(std::env::args_os()));
}
