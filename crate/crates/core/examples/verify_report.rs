//! Run every acceptance check and print the report with per-check timings.

use ps_trident::verify;

fn main() {
    let results = verify::run_all();
    print!("{}", verify::render(&results));
    for r in &results {
        println!("check {:>2}: {:.2} s", r.id, r.seconds);
    }
}
