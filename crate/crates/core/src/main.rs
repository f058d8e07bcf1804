fn main() {
    std::process::exit(rvd_cascade::cli::main_with(std::env::args_os()));
}
