use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let env = |name: &str| std::env::var(name).ok();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match tqe_cli::run(std::env::args_os(), &env, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
