fn main() {
    std::process::exit(radplan_cli::run(std::env::args_os()));
}
