fn main() {
    std::process::exit(fairdiv::cli::main_with_args(std::env::args_os()));
}
