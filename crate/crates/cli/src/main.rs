fn main() -> std::process::ExitCode {
    epd::cli::main()
}
