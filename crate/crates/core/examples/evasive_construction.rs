//! The random-algebraic construction in F_49^2 next to the moment curve.

use evasion::evasive::{construct_evasive, is_evasive, slice_bound, EvasiveParams};
use evasion::field::FieldCtx;
use evasion::geom::moment_curve;
use evasion::rng::RandomStream;

fn main() -> evasion::Result<()> {
    let q = 49;
    let params = EvasiveParams {
        n: 2,
        k: 1,
        d: 1,
        r: 1,
        q,
    };
    let mut rng = RandomStream::new(2024);
    let c = construct_evasive(&params, &mut rng, 10)?;
    println!(
        "schedule: degrees {:?}, r = {}",
        c.schedule.degrees, c.schedule.r_value
    );
    for poly in &c.polys {
        println!("sampled: {}", poly.to_text());
    }
    println!(
        "candidate of {} points on chart {} after {} samples",
        c.candidate.len(),
        c.chart,
        c.trials_used
    );
    println!(
        "at r = {}: evasive {}, busiest line holds {} ({} {})",
        c.verify_r,
        c.verdict.evasive,
        c.verdict.max_intersection,
        c.verdict.witness_kind(),
        c.verdict.witness_encoding()
    );
    println!(
        "at r = {}: evasive {}",
        c.verdict_at_schedule.r, c.verdict_at_schedule.evasive
    );
    println!("slice bound: {}", slice_bound(&params.with_r(c.verify_r)));

    let ctx = FieldCtx::from_order(q as u64)?;
    let curve = moment_curve(&ctx, 2)?;
    let v = is_evasive(&curve, &params.with_r(3))?;
    println!(
        "moment curve: {} points, no three collinear: {}",
        curve.len(),
        v.evasive
    );

    let ctx = FieldCtx::from_order(7)?;
    let curve = moment_curve(&ctx, 3)?;
    let p3 = EvasiveParams {
        n: 3,
        k: 2,
        d: 1,
        r: 4,
        q: 7,
    };
    let v = is_evasive(&curve, &p3)?;
    println!(
        "moment curve in F_7^3: at most {} points on a plane",
        v.max_intersection
    );
    Ok(())
}
