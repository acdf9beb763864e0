use std::io::Write;

fn main() {
    let o = bifree_cli::run(std::env::args_os());
    std::io::stdout().write_all(o.stdout.as_bytes()).ok();
    std::io::stderr().write_all(o.stderr.as_bytes()).ok();
    std::process::exit(o.code);
}
