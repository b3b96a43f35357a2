fn main() {
    std::process::exit(simred_cli::cli::main_with_code());
}
