fn main() {
    std::process::exit(ca_forge_cli::run_cli(std::env::args_os()));
}
