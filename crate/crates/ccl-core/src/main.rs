fn main() {
    std::process::exit(ccl_core::cli::main_with_args(std::env::args_os()));
}
