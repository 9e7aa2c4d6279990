fn main() -> std::process::ExitCode {
    path2vec::cli::main()
}
