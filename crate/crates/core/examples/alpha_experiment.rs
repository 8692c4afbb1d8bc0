//! α(F_q^2, p): largest no-three-in-line subset of a p-random set, solved
//! exactly, with the report written as JSON and CSV.

use evasion::experiments::{run_alpha, AlphaConfig};
use evasion::report;

fn main() -> evasion::Result<()> {
    let q = 7;
    for p in [0.0, 0.05, 0.2, 0.5, 1.0] {
        let rep = run_alpha(&AlphaConfig::new(q, p, 10, 99))?;
        println!(
            "q={q} p={p:<4} mean alpha {:>5.2} [{}, {}] mode {:<9} band {:<13} deletion bound {:.2}",
            rep.mean, rep.min, rep.max, rep.mode, rep.band, rep.deletion_lower_bound
        );
    }

    let rep = run_alpha(&AlphaConfig::new(11, 0.4, 5, 1))?;
    let dir = std::env::temp_dir();
    let json = dir.join("alpha_q11.json");
    let csv = dir.join("alpha_q11.csv");
    report::write(&json, &report::to_json(&rep)?)?;
    report::write(&csv, &report::to_csv(&rep, "rows", &[])?)?;
    println!("\nwrote {} and {}", json.display(), csv.display());
    print!("{}", report::to_csv(&rep, "rows", &[])?);
    println!("{}", rep.band_caveat);
    Ok(())
}
