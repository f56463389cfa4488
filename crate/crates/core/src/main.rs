fn main() {
    std::process::exit(tdakit::cli::main_with_args(std::env::args_os()));
}
