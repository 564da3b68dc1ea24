fn main() {
    std::process::exit(flat_ribbon::cli::main_with_args(std::env::args_os()));
}
