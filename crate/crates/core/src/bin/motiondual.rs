fn main() {
    std::process::exit(motiondual::cli::run(std::env::args_os()));
}
