fn main() -> std::process::ExitCode {
    lpspectra::cli::run()
}
