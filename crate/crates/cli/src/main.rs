fn main() {
    std::process::exit(entraj_cli::main_with_args(std::env::args_os()));
}
