fn main() {
    std::process::exit(fsd_cli::run(std::env::args_os()));
}
