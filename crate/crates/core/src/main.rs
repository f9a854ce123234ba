fn main() {
    std::process::exit(anosov::cli::run(std::env::args_os()));
}
