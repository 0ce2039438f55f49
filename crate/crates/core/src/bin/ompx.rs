fn main() {
    std::process::exit(ompx::bench::cli::main_with_env());
}
