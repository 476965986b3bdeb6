fn main() {
    std::process::exit(georef::cli::run());
}
