fn main() {
    std::process::exit(decaycert::cli::main_with_args(std::env::args_os()));
}
