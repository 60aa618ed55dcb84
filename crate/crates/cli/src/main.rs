fn main() {
    std::process::exit(rslab_cli::run());
}
