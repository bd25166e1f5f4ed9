fn main() {
    std::process::exit(gaplab::cli::main_with_args(std::env::args_os()));
}
