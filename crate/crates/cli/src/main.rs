fn main() {
    std::process::exit(plap_cli::dispatch(std::env::args_os()));
}
