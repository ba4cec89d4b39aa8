fn main() {
    std::process::exit(walsh_prep::cli::run());
}
