fn main() {
    std::process::exit(oblique_duals::cli::run(std::env::args_os()));
}
