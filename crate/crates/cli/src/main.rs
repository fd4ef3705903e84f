fn main() {
    std::process::exit(ito_lab::run(std::env::args_os()));
}
