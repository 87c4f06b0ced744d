fn main() {
    std::process::exit(netres::cli::main_with_args(std::env::args_os()));
}
