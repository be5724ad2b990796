//! Acceptance suite: runs every criterion at its pinned size and tolerance
//! and prints one line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;

use microloc_verify::{run, IDS};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in IDS {
        match run(id) {
            Ok(out) => {
                println!("{}", out.line());
                for n in &out.notes {
                    println!("      note: {n}");
                }
                if !out.passed() {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("{id:<4}FAIL  error: {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", IDS.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
