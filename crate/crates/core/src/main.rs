fn main() {
    std::process::exit(fppsim::cli::run(std::env::args()));
}
