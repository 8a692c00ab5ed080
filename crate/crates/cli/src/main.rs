fn main() {
    std::process::exit(wiregen_cli::run(std::env::args_os()));
}
