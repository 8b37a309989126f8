fn main() {
    std::process::exit(rnstab::cli::main_with_args(std::env::args_os()));
}
