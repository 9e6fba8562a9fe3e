fn main() {
    std::process::exit(majorana_lab::cli::run(std::env::args_os()));
}
