fn main() -> std::process::ExitCode {
    qrepnet::cli::main()
}
