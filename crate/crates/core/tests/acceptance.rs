//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The full report is produced three times: on 8 threads, on 1 thread and on 8
//! threads again. Lines 1 to 11 come from the first run and must also meet
//! their time allowance. Line 12 passes when the three rendered reports are
//! byte-identical and the in-library fingerprint comparison agrees.

use ps_trident::verify::{self, CriterionResult};

fn line(r: &CriterionResult, pass: bool) -> String {
    let limit = r.limit_seconds.map(|l| format!(", limit {l:.0} s")).unwrap_or_default();
    format!(
        "criterion {:>2}: {} [{:.2} s{limit}] {}: {}",
        r.id,
        if pass { "PASS" } else { "FAIL" },
        r.seconds,
        r.title,
        r.detail
    )
}

fn main() {
    let results = verify::with_threads(8, verify::run_all).expect("thread pool");
    let first = verify::render(&results);
    let single = verify::render(&verify::with_threads(1, verify::run_all).expect("thread pool"));
    let repeat = verify::render(&verify::with_threads(8, verify::run_all).expect("thread pool"));
    let mut failed = 0;
    for r in &results {
        let in_time = r.limit_seconds.is_none_or(|l| r.seconds <= l);
        let mut pass = r.pass && in_time;
        let mut note = String::new();
        if r.id == 12 {
            let same = first == single && first == repeat;
            pass &= same;
            note = format!("; full reports at 8, 1, 8 threads identical={same}");
        }
        if !in_time {
            note.push_str("; over time allowance");
        }
        if !pass {
            failed += 1;
        }
        println!("{}{note}", line(r, pass));
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
