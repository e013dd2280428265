fn main() {
    std::process::exit(hsbm_cli::run(std::env::args_os()));
}
