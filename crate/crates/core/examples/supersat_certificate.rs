//! The randomized (1,3)-set hypergraph of a random half of F_11^2 and its
//! codegree certificate.

use evasion::cctree::{supersat_hypergraph, SupersatParams};
use evasion::experiments::{edges_are_krsets, sample_supersat_input};
use evasion::field::FieldCtx;
use evasion::geom::Space;
use evasion::rng::RandomStream;

fn main() -> evasion::Result<()> {
    let space = Space::new(FieldCtx::from_order(11)?, 2)?;
    let params = SupersatParams::new(1, 3, 1.0, 0.01);
    let mut rng = RandomStream::new(5);
    for m in [40, 60, 90] {
        let (p, draws) = sample_supersat_input(&space, m, &params, &mut rng, 1000)?;
        let (h, cert) = supersat_hypergraph(&p, &params, &mut rng)?;
        println!(
            "m={m} ({draws} draws): |E| = {}, tau = {:.4}, clamped pairs {}, edges collinear {}",
            cert.edges,
            cert.tau,
            cert.p_clamped,
            edges_are_krsets(&h, &space, 1)
        );
        for i in 0..cert.deltas.len() {
            println!(
                "  Delta_{} = {:>4}  target {:>10.3}  margin {:>10.3}",
                i + 1,
                cert.deltas[i],
                cert.targets[i],
                cert.margins[i]
            );
        }
        println!(
            "  smallest theta for the Delta_1 bound: {:.3}",
            cert.theta_min
        );
    }

    let few = evasion::geom::PointSet::from_indices(space, (0..5).collect());
    if let Err(e) = supersat_hypergraph(&few, &params, &mut rng) {
        println!("5 points: {e}");
    }
    Ok(())
}
