fn main() {
    std::process::exit(qht::cli::main_with_args(std::env::args_os()));
}
