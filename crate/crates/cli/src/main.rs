fn main() {
    std::process::exit(vtolverify_cli::main_with_args(std::env::args_os()));
}
