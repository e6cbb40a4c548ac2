//! One PASS/FAIL line per acceptance criterion. Criteria with a known gap
//! are reported as they stand; their corrected checks must pass.

use ntlab_cli::acceptance::{run_selected, Config};

fn main() {
    let only: Vec<u32> = std::env::var("NTLAB_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect())
        .unwrap_or_default();
    let results = run_selected(&Config::default(), &only, |r| println!("{}", r.line()));
    let mut failed = Vec::new();
    for r in &results {
        let ok = match &r.gap {
            Some(g) => g.corrected_passed && r.elapsed <= r.budget,
            None => r.passed,
        };
        if !ok {
            failed.push(r.id);
        }
    }
    let known: Vec<u32> = results.iter().filter(|r| !r.passed && r.gap.is_some()).map(|r| r.id).collect();
    println!(
        "acceptance: {} of {} criteria pass as stated; known gaps {:?}; unexpected failures {:?}",
        results.iter().filter(|r| r.passed).count(),
        results.len(),
        known,
        failed
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
