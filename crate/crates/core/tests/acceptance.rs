//! Runs the twelve acceptance criteria with their full parameters and prints
//! one line per criterion. Set BIFREE_ACCEPTANCE_ONLY=3,7 to run a subset.

use bifree::suites::{render_report, run_suite, SuiteParams, SUITES};
use std::time::Instant;

/// Wall-clock limits stated for some criteria, in seconds.
fn time_limit(k: u8) -> Option<f64> {
    match k {
        1 => Some(10.0),
        2 => Some(60.0),
        3 => Some(120.0),
        6 => Some(600.0),
        _ => None,
    }
}

fn main() {
    let only: Option<Vec<u8>> = std::env::var("BIFREE_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let params = SuiteParams { seed: 7, ..Default::default() };
    let mut failed = 0;
    for (k, name, summary) in SUITES {
        if only.as_ref().is_some_and(|o| !o.contains(&k)) {
            continue;
        }
        let start = Instant::now();
        let result = run_suite(k, &params);
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match &result {
            Ok(r) => {
                let within = time_limit(k).is_none_or(|t| secs <= t);
                let mut d = format!("{} checks", r.checked());
                if !within {
                    d.push_str(&format!(", over the {}s limit", time_limit(k).unwrap()));
                }
                (r.passed() && within, d)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {k:>2} {name:<18} {}  ({detail}, {secs:.1}s)  {summary}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failed += 1;
            if let Ok(r) = &result {
                eprint!("{}", render_report(r));
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
