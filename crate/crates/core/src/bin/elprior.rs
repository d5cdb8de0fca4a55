fn main() {
    std::process::exit(elprior::cli::main_with_args(std::env::args_os()));
}
