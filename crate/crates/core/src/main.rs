fn main() {
    std::process::exit(binomial_bell::cli::run(std::env::args_os()));
}
