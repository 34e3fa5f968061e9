fn main() {
    std::process::exit(pbp_core::cli::main_with_args(std::env::args_os()));
}
