fn main() {
    std::process::exit(colheat_cli::main_with_args(std::env::args_os()));
}
