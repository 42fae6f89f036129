fn main() {
    std::process::exit(nonlocal_supersol::cli::run(std::env::args_os()));
}
