fn main() {
    std::process::exit(omega_succinct::cli::run(std::env::args_os()));
}
