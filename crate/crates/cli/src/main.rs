use std::io::Write;

fn main() {
    let (code, report) = hironaka_cli::run(std::env::args());
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    // a closed pipe is not an error for the caller
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    std::process::exit(code);
}
