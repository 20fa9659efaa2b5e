fn main() {
    std::process::exit(wembed::cli::run(std::env::args_os()));
}
