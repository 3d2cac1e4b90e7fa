fn main() -> std::process::ExitCode {
    e8spread::cli::main()
}
