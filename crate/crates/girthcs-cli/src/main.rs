fn main() {
    std::process::exit(girthcs_cli::run(std::env::args_os()));
}
