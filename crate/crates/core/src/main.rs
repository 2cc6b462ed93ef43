fn main() {
    std::process::exit(anticonc::cli::main_with_args(std::env::args_os()));
}
