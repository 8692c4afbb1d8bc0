//! The (k,r)-set container-clique tree process on F_11^2 with k = 1, r = 3.

use evasion::experiments::{run_cctree, TreeConfig};

fn main() -> evasion::Result<()> {
    let mut cfg = TreeConfig::krset(11, 2, 1, 3, 5.0, 1);
    cfg.c = 0.2;
    cfg.samples = 2_000;
    let (rep, tree) = run_cctree(&cfg)?;
    let s = rep.stats.as_ref().expect("tree built");
    println!(
        "{} nodes, {} leaves, height {}, chi {}, kappa {}, lambda {}",
        s.nodes, s.nu, s.height, s.chi, s.kappa, s.lambda
    );
    println!("aleph_log2 = {:.3}", s.aleph_log2);
    println!(
        "leaves below 2 theta q: {}, cliques inside lines: {}, progress: {}",
        rep.leaves_small, rep.cliques_in_flats, rep.progress_ok
    );
    let v = rep.verification.as_ref().expect("verified");
    println!(
        "{} cliques checked ({}), {} sampled independent sets covered: {}",
        v.cliques_checked, v.clique_pass, v.sets_checked, v.cover_pass
    );
    for log in rep.log.iter().take(3) {
        println!(
            "node {}: |C0| = {}, {} edges, tau = {:.3}, {} containers",
            log.node,
            log.c0_size,
            log.edges,
            log.tau.unwrap_or(f64::NAN),
            log.family_size
        );
    }
    let tree = tree.expect("tree built");
    let path = std::env::temp_dir().join("krset_tree_q11.txt");
    std::fs::write(&path, tree.to_text(3)?)?;
    println!("tree written to {}", path.display());
    Ok(())
}
