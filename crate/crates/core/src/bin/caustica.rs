fn main() {
    std::process::exit(caustica::cli::run(std::env::args_os()));
}
