fn main() {
    std::process::exit(demosim::cli::parse_and_dispatch(std::env::args_os()));
}
