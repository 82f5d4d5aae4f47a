//! One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

use std::time::Instant;
use stdmap::exec::Exec;
use stdmap::suite::{acceptance_one, ACCEPTANCE};

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for name in ACCEPTANCE {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let v = acceptance_one(name, Exec::Parallel).expect("known criterion");
        println!("{} [{:.1}s]", v.line(), t.elapsed().as_secs_f64());
        failed += !v.pass as usize;
    }
    if failed > 0 {
        println!("{} acceptance criteria failed", failed);
        std::process::exit(1);
    }
}
