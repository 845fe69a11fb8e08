fn main() {
    std::process::exit(cmc_core::cli::main_with_args(std::env::args_os()));
}
