fn main() {
    std::process::exit(tlsc::cli::main_with_args(std::env::args_os()));
}
