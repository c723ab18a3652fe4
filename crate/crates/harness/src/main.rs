fn main() -> std::process::ExitCode {
    rud_harness::cli::main()
}
