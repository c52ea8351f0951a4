fn main() {
    std::process::exit(xtal::cli::run(std::env::args_os()));
}
