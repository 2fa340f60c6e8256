fn main() {
    std::process::exit(qseal::cli::main());
}
