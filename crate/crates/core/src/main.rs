fn main() {
    let code = epbeam::cli::run(std::env::args_os().collect(), &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
