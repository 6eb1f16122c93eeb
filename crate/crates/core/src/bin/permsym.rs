fn main() {
    std::process::exit(permsym::cli::run(std::env::args_os()));
}
