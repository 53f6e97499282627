fn main() {
    std::process::exit(seqlab::cli::main_with_args(std::env::args_os()));
}
