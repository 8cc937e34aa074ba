use std::io::Write;

fn main() {
    let outcome = krorder_cli::dispatch(std::env::args());
    let mut out = std::io::stdout().lock();
    // One write, so concurrent runs never interleave partial reports.
    let _ = out.write_all(outcome.stdout.as_bytes());
    let _ = out.flush();
    std::process::exit(outcome.code);
}
