use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (outcome, err) = lll_certify::cli::main_with_args(std::env::args_os());
    if !outcome.stdout.is_empty() {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(outcome.stdout.as_bytes());
        let _ = out.flush();
    }
    if let Some(message) = err {
        eprintln!("{}", message.trim_end());
    }
    ExitCode::from(outcome.status as u8)
}
