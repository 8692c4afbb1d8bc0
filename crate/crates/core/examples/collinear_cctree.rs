//! The collinear-triple container-clique tree. At q = 9 the full tree is far
//! too large to build, so the run stops at the node cap; sampled
//! independent sets are then traced along their own root-to-leaf paths.

use evasion::experiments::{run_cctree, TreeConfig};

fn main() -> evasion::Result<()> {
    let mut cfg = TreeConfig::collinear(9, 3);
    cfg.max_nodes = 5_000;
    cfg.trace_samples = 200;
    let (rep, _) = run_cctree(&cfg)?;
    match (&rep.stats, &rep.error) {
        (Some(s), _) => println!(
            "built: {} nodes, height {}, lambda {}",
            s.nodes, s.height, s.lambda
        ),
        (None, Some(e)) => println!("{e}"),
        _ => {}
    }
    if let Some(t) = &rep.trace {
        println!(
            "traced {} sets: all contained {}, all leaves below (1+eps)q {}, largest leaf {}, depth up to {}, lambda up to {}",
            t.samples, t.all_contained, t.all_leaves_small, t.max_leaf_c0, t.max_depth, t.max_lambda
        );
    }
    Ok(())
}
