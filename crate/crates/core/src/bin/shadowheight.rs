fn main() {
    std::process::exit(shadowheight::commands::main_with_args(std::env::args_os()));
}
