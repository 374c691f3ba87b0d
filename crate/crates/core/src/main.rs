fn main() {
    std::process::exit(relhom::cli::main_with_args(std::env::args_os()));
}
