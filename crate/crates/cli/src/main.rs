fn main() {
    affectwear_cli::init_logging();
    std::process::exit(affectwear_cli::run(std::env::args_os()));
}
