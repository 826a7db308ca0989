fn main() {
    std::process::exit(wbe_core::cli::main_with_args(std::env::args_os()));
}
