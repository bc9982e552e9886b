fn main() {
    std::process::exit(unison_sim::cli::main_entry());
}
