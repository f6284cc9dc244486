fn main() -> std::process::ExitCode {
    omega_rm::cli::main()
}
