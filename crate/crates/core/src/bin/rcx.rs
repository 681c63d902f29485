fn main() {
    std::process::exit(rcx::cli::main(std::env::args_os()));
}
