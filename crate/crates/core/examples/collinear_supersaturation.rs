//! Collinear triples of random planar point sets against the
//! supersaturation lower bound m(q+1)x(x-1)/6, x = (m-1)/(q+1).

use evasion::field::FieldCtx;
use evasion::geom::{
    count_collinear_triples, count_collinear_triples_brute, supersat_lower_bound, PointSet, Space,
};
use evasion::poly::binomial;
use evasion::rng::RandomStream;

fn main() -> evasion::Result<()> {
    let mut rng = RandomStream::new(7);
    for q in [5u64, 7, 11, 13] {
        let space = Space::new(FieldCtx::from_order(q)?, 2)?;
        println!("q = {q}");
        println!(
            "{:>8} {:>6} {:>10} {:>12} {:>8}",
            "density", "m", "triples", "bound", "ratio"
        );
        for density in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let idx: Vec<u32> = (0..space.size()).filter(|_| rng.unit() < density).collect();
            let p = PointSet::from_sorted(space.clone(), idx);
            let count = count_collinear_triples(&p)?;
            let bound = supersat_lower_bound(p.len() as u64, q);
            let ratio = if bound > 0.0 {
                count as f64 / bound
            } else {
                f64::NAN
            };
            println!(
                "{density:>8.1} {:>6} {count:>10} {bound:>12.1} {ratio:>8.3}",
                p.len()
            );
        }
        let full = PointSet::full(space.clone());
        let closed_form = (q * q + q) as u128 * binomial(q, 3);
        println!(
            "full plane: {} triples, (q^2+q)C(q,3) = {closed_form}\n",
            count_collinear_triples(&full)?
        );
    }

    let f3 = PointSet::full(Space::new(FieldCtx::from_order(3)?, 2)?);
    println!(
        "F_3^2: {} triples (brute force {}), bound {}",
        count_collinear_triples(&f3)?,
        count_collinear_triples_brute(&f3)?,
        supersat_lower_bound(9, 3)
    );
    Ok(())
}
