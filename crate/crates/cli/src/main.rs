use std::io::Write;

fn main() {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let out = polytile::run_cli(std::env::args_os());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
