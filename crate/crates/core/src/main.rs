fn main() {
    std::process::exit(dyncolour::cli::main_with(std::env::args_os()));
}
