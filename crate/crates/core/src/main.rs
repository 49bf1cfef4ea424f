fn main() {
    std::process::exit(pyramid_landing::cli::run());
}
