fn main() {
    std::process::exit(teamlogic::cli::run());
}
