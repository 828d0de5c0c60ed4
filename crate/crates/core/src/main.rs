fn main() {
    std::process::exit(giant_scatter::cli::run(std::env::args_os()));
}
