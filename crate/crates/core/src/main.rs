fn main() {
    std::process::exit(wcs_core::cli::main_with_args(std::env::args_os()));
}
