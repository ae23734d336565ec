fn main() {
    std::process::exit(wpcurv_core::cli::run(std::env::args_os()));
}
