fn main() {
    std::process::exit(rhw::cli::main_with(std::env::args_os().collect()));
}
