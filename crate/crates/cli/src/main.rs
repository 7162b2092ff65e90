use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = lglab::run(std::env::args_os());
    if let Some(err) = &outcome.error {
        eprintln!("{}", err.trim_end());
    }
    if !outcome.written_to_file && !outcome.output.is_empty() {
        let mut out = std::io::stdout().lock();
        // A closed pipe is not worth a panic.
        let _ = out.write_all(outcome.output.as_bytes());
    }
    ExitCode::from(outcome.status as u8)
}
