fn main() {
    std::process::exit(qmeasure_cli::run(std::env::args_os()));
}
