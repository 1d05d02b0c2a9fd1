fn main() -> std::process::ExitCode {
    nvzeno::cli::main()
}
