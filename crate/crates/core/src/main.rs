fn main() {
    let code = progchan::cli::main_with_args(std::env::args_os());
    std::process::exit(code);
}
