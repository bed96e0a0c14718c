fn main() {
    std::process::exit(rwalk_cli::run(std::env::args_os()));
}
