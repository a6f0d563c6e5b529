fn main() {
    std::process::exit(chronoturn::cli::main_with(std::env::args_os()));
}
