fn main() {
    let code = fabris::commands::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
