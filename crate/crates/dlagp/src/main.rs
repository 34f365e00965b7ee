fn main() -> std::process::ExitCode {
    dlagp::cli::run()
}
