fn main() {
    std::process::exit(adrisk::cli::run());
}
