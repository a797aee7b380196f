fn main() {
    std::process::exit(sparse_series_cli::run(std::env::args_os()));
}
