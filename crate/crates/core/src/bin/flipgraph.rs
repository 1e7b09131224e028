fn main() {
    std::process::exit(flipgraph::cli::run(std::env::args_os()));
}
