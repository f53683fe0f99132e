//! One PASS/FAIL line per acceptance criterion; failing checks go to stderr.

use arcdet_core::harness::{run_criterion, RunOptions, CRITERIA};

fn main() {
    let options = RunOptions::default();
    let mut failed = 0;
    for spec in &CRITERIA {
        match run_criterion(spec.id, &options) {
            Ok(r) => {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                println!("{verdict} criterion {:>2}: {} ({:.1} s)", r.id, r.title, r.elapsed);
                for c in r.checks.iter().filter(|c| !c.passed) {
                    eprintln!("    criterion {} {}: {}", r.id, c.name, c.detail);
                }
                if !r.passed {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("FAIL criterion {:>2}: {} (error: {e})", spec.id, spec.title);
                failed += 1;
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
