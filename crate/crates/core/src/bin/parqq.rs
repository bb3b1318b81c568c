fn main() {
    std::process::exit(parqq::cli::main_entry());
}
