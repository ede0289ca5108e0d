fn main() {
    std::process::exit(goodhart::cli::run());
}
