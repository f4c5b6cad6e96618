fn main() {
    std::process::exit(kgfield::cli::run(std::env::args_os()));
}
