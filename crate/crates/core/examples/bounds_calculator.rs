//! Slice bound, Chow dimension and degree schedules for a few parameter sets.

use evasion::evasive::{
    chow_dim, degree_schedule, slice_bound, twisted_degree_bound, EvasiveParams,
};

fn main() -> evasion::Result<()> {
    println!(
        "{:>3} {:>3} {:>3} {:>6} {:>12} {:>8} {:>10}",
        "n", "k", "d", "chow", "degrees", "r", "twisted"
    );
    for (n, k, d) in [
        (2, 1, 1),
        (2, 1, 2),
        (3, 1, 1),
        (3, 2, 1),
        (3, 1, 2),
        (4, 2, 1),
        (4, 1, 1),
        (3, 3, 2),
    ] {
        let s = degree_schedule(n, k, d)?;
        let chow = if k < n {
            chow_dim(d as u64, k as u64, n as u64).to_string()
        } else {
            "-".into()
        };
        println!(
            "{n:>3} {k:>3} {d:>3} {chow:>6} {:>12} {:>8} {:>10}",
            format!("{:?}", s.degrees),
            s.r_value,
            twisted_degree_bound(n, k, d)?
        );
    }

    println!();
    for q in [5, 7, 49] {
        let p = EvasiveParams {
            n: 2,
            k: 1,
            d: 1,
            r: 3,
            q,
        };
        println!("slice bound n=2 k=1 d=1 r=3 q={q}: {}", slice_bound(&p));
    }
    Ok(())
}
