fn main() {
    std::process::exit(redbundle::cli::run());
}
