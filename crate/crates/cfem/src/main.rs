fn main() {
    std::process::exit(cfem::cli::main_with_args(std::env::args_os()));
}
