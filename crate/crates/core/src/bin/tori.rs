fn main() {
    std::process::exit(tori::cli::run(std::env::args_os()));
}
