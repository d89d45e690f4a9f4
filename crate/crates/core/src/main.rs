fn main() {
    std::process::exit(hybrid_core::cli::main_with_args(std::env::args_os()));
}
