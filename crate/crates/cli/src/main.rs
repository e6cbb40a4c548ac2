fn main() {
    std::process::exit(ntlab_cli::run(std::env::args_os()));
}
