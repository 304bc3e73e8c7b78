fn main() {
    std::process::exit(qap_landscape::cli::main_with_args(std::env::args_os()));
}
