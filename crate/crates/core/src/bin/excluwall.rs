fn main() {
    std::process::exit(excluwall::cli::run(std::env::args_os()));
}
