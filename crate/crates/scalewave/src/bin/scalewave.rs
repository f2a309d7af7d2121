fn main() {
    std::process::exit(scalewave::cli::main_with_args(std::env::args_os()));
}
