fn main() {
    std::process::exit(polyvem::cli::main_from(std::env::args_os()));
}
