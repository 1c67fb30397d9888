fn main() {
    std::process::exit(cdlab::main_with(std::env::args_os()));
}
