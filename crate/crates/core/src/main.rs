fn main() {
    std::process::exit(transport_nbc::cli::run_from_args(std::env::args_os()));
}
