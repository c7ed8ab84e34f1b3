fn main() {
    std::process::exit(weibull_gof_cli::main_with_args(std::env::args_os()));
}
