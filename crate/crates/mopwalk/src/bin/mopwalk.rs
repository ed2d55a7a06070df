fn main() {
    std::process::exit(mopwalk::cli::main_with_args(std::env::args_os()));
}
