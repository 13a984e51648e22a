fn main() -> std::process::ExitCode {
    riesz_lab::cli::main_entry()
}
