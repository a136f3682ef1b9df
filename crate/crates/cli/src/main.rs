fn main() {
    std::process::exit(gbs_qec_cli::run(std::env::args_os()));
}
