use std::io::{stderr, stdout};

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let code = modcurve_cli::run(&argv, &mut stdout(), &mut stderr());
    std::process::exit(code);
}
