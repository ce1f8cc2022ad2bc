fn main() {
    std::process::exit(ppoints::cli::main());
}
