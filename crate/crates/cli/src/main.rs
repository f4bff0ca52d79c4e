fn main() {
    std::process::exit(bsym::run(std::env::args_os()));
}
