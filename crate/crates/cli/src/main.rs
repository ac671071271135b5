use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let out = monoprob_cli::run(&argv);
    std::io::stdout().write_all(out.stdout.as_bytes()).expect("stdout");
    std::io::stderr().write_all(out.stderr.as_bytes()).expect("stderr");
    std::process::exit(out.code);
}
