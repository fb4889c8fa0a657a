fn main() {
    std::process::exit(curvapprox::main_with_args(std::env::args_os()));
}
