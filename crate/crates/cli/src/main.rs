fn main() {
    std::process::exit(dualtree_cli::run(std::env::args_os()));
}
