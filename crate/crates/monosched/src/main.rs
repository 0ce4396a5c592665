fn main() -> std::process::ExitCode {
    monosched::cli::main()
}
