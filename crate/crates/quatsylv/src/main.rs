fn main() {
    std::process::exit(quatsylv::cli::main_with_args(std::env::args_os()));
}
