//! General-position subsets of F_q^n, counted two ways.

use evasion::experiments::{count_general_position, count_general_position_oracle};
use evasion::field::FieldCtx;

fn main() -> evasion::Result<()> {
    for (q, n) in [(2u64, 2usize), (3, 2), (4, 2), (5, 2), (2, 3), (2, 4)] {
        let ctx = FieldCtx::from_order(q)?;
        let count = count_general_position(&ctx, n)?;
        let oracle = match count_general_position_oracle(&ctx, n) {
            Ok(v) => v.to_string(),
            Err(e) => format!("({e})"),
        };
        println!(
            "q={q} n={n}: {count} general-position sets, inclusion-exclusion {oracle}, 2^q = {}",
            1u64 << q
        );
    }
    Ok(())
}
