fn main() {
    std::process::exit(blockmax_cli::app::run_from(std::env::args_os()));
}
