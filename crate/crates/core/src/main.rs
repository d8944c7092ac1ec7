fn main() {
    std::process::exit(cutlab::cli::main());
}
