fn main() {
    std::process::exit(bifront::cli::run());
}
