use std::io::Write;

fn main() {
    let (code, out) = scat_core::cli::run(std::env::args_os());
    let text = out.as_bytes();
    let _ = if code == 0 || code == 1 || code == 2 {
        std::io::stdout().write_all(text)
    } else {
        std::io::stderr().write_all(text)
    };
    std::process::exit(code);
}
