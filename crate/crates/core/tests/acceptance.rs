//! Acceptance battery: runs the nine built-in verification checks and
//! prints one pass/fail line per criterion. Non-harness so the lines
//! appear directly in `cargo test` output.

use curve_koszul::suite::run_suite;

fn main() {
    println!("running acceptance suite (9 criteria)");
    let results = run_suite();
    let mut failed = 0usize;
    for (i, r) in results.iter().enumerate() {
        println!(
            "criterion {}: [{}] {} ({} ms)",
            i + 1,
            if r.pass { "pass" } else { "FAIL" },
            r.name,
            r.millis
        );
        if !r.pass {
            failed += 1;
            println!("    {}", r.detail);
        }
    }
    if failed > 0 {
        println!("acceptance: {failed}/{} criteria FAILED", results.len());
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria passed", results.len());
}
