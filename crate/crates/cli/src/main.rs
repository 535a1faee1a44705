fn main() {
    std::process::exit(obsrel_cli::run(std::env::args_os()));
}
