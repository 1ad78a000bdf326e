//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Set `ACCEPTANCE_EXTENDED=1` to add the height-4000 point counts.

use cubic_brauer::suite::{self, SuiteConfig};

fn main() {
    let extended = std::env::var("ACCEPTANCE_EXTENDED").is_ok_and(|v| v == "1");
    let cfg = SuiteConfig { extended, ..SuiteConfig::default() };
    println!("acceptance: running {} criteria", if extended { "all" } else { "non-extended" });
    let report = suite::run(None, &cfg, |r| {
        println!("{}", r.line());
        if !r.pass {
            println!("    expected: {}", r.expected);
            println!("    measured: {}", r.measured);
        }
    });
    let failed = report.results.iter().filter(|r| !r.pass).count();
    println!("acceptance: {} passed, {failed} failed", report.results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
