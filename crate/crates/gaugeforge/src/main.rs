fn main() {
    std::process::exit(gaugeforge::cli::main_entry());
}
