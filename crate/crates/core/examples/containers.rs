//! Container families of the Fano plane and of the collinear triples of
//! AG(2,3), checked against every independent set.

use evasion::container::{
    build_containers, check_codegree_condition, verify_containers, ContainerParams, VerifyMode,
};
use evasion::field::FieldCtx;
use evasion::geom::{PointSet, Space};
use evasion::hyper::{fano, Hypergraph};

fn show(name: &str, h: &Hypergraph, tau: f64, c: f64) -> evasion::Result<()> {
    let params = ContainerParams::new(tau, c);
    let fam = build_containers(h, &params)?;
    println!(
        "{name}: |V| = {}, |E| = {}, tau = {tau}, c = {c}",
        h.num_vertices(),
        h.num_edges()
    );
    print!("{}", fam.to_text());
    let rep = verify_containers(h, &fam, VerifyMode::Exhaustive)?;
    println!(
        "{} containers, {} independent sets checked: covered {}, edge drop {} (max fraction {:.3})",
        fam.len(),
        rep.sets_checked,
        rep.a_pass,
        rep.c_pass,
        rep.max_edge_fraction
    );
    let cd = check_codegree_condition(h, tau, c)?;
    for m in &cd.per_i {
        println!("  Delta_{} = {} vs {:.3}", m.i, m.delta, m.bound);
    }
    println!();
    Ok(())
}

fn main() -> evasion::Result<()> {
    show("Fano plane", &fano(), 0.3, 0.05)?;
    let plane = PointSet::full(Space::new(FieldCtx::from_order(3)?, 2)?);
    show(
        "AG(2,3)",
        &Hypergraph::collinear_triples(&plane)?,
        0.2,
        0.05,
    )?;
    Ok(())
}
