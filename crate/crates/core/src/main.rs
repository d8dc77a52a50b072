fn main() {
    std::process::exit(tgwave::cli::main_with_args(std::env::args_os()));
}
