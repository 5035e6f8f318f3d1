fn main() {
    std::process::exit(templex::cli::main(std::env::args_os()));
}
