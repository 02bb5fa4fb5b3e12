fn main() {
    std::process::exit(subspace_forge::cli::run(std::env::args_os()));
}
