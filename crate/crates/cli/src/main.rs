use std::process::ExitCode;

use bc_canon_cli::{format_report, parse_args, run_cli, TOL_ENV};

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let env = std::env::var(TOL_ENV).ok();
    let (report, status) = run_cli(&cli, env.as_deref());
    print!("{}", format_report(&report, cli.format));
    ExitCode::from(status.code() as u8)
}
