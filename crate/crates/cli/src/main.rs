fn main() {
    std::process::exit(regime_lab::run(std::env::args_os()));
}
