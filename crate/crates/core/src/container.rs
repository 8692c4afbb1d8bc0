//! Hypergraph containers by maximum-degree fingerprinting.
//!
//! The search keeps a fingerprint `S` (vertices assumed to be in the
//! independent set) and the still-undecided vertices `A`; the container is
//! `S ∪ A`. At each step the undecided vertex of largest degree in
//! `H[S ∪ A]` is branched on: either it leaves `A`, or it joins `S` and every
//! vertex that would complete an edge with `S` leaves `A`. Any independent
//! set follows one branch to the end and stays inside its container. A
//! branch stops once the container spans at most `(1 - c)|E|` edges or the
//! fingerprint reaches the cap.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyper::{all_independent_sets, Hypergraph};
use crate::rng::RandomStream;

/// Default limit on the number of containers before the build gives up.
pub const DEFAULT_MAX_CONTAINERS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContainerParams {
    pub tau: f64,
    pub c: f64,
    /// Largest fingerprint; `None` means `⌈τ |V|⌉ · r`.
    pub fingerprint_cap: Option<usize>,
    pub max_containers: usize,
}

impl ContainerParams {
    pub fn new(tau: f64, c: f64) -> Self {
        ContainerParams {
            tau,
            c,
            fingerprint_cap: None,
            max_containers: DEFAULT_MAX_CONTAINERS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 0.5) {
            return Err(Error::InvalidParams(format!(
                "tau = {} outside (0, 1/2)",
                self.tau
            )));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidParams(format!(
                "c = {} outside (0, 1)",
                self.c
            )));
        }
        Ok(())
    }

    pub fn cap_for(&self, h: &Hypergraph) -> usize {
        self.fingerprint_cap
            .unwrap_or_else(|| (self.tau * h.num_vertices() as f64).ceil() as usize * h.r())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyStats {
    pub count: usize,
    /// Natural log of the family size.
    pub log_count: f64,
    pub max_container: usize,
    pub max_fingerprint: usize,
    /// Largest `e(H[C]) / |E|` over containers (0 for edgeless H).
    pub max_edge_fraction: f64,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainerFamily {
    pub params: ContainerParams,
    /// Sorted vertex lists, ordered by fingerprint.
    pub containers: Vec<Vec<u32>>,
    pub fingerprints: Vec<Vec<u32>>,
    /// Per container: stopped by the fingerprint cap, not by the edge target.
    pub truncated: Vec<bool>,
    pub stats: FamilyStats,
}

impl ContainerFamily {
    pub fn len(&self) -> usize {
        self.containers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.containers.is_empty()
    }

    /// One line per container: `fingerprint | container`.
    pub fn to_text(&self) -> String {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        for (f, c) in self.fingerprints.iter().zip(&self.containers) {
            out.push_str(&join(f));
            out.push_str(" | ");
            out.push_str(&join(c));
            out.push('\n');
        }
        out
    }

    /// Parses the line format; statistics are recomputed against `h`.
    pub fn parse_text(s: &str, h: &Hypergraph, params: ContainerParams) -> Result<Self> {
        let nums = |t: &str| -> Result<Vec<u32>> {
            t.split_whitespace()
                .map(|x| {
                    x.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("{x}: {e}")))
                })
                .collect()
        };
        let mut pairs = Vec::new();
        for line in s.lines().filter(|l| !l.trim().is_empty()) {
            let (f, c) = line
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("missing `|` in `{line}`")))?;
            pairs.push((nums(f)?, nums(c)?, false));
        }
        Ok(assemble(h, params, pairs))
    }
}

struct State {
    in_container: Vec<bool>,
    in_s: Vec<bool>,
    /// Degree of each vertex in `H[S ∪ A]`.
    degree: Vec<u32>,
    edges: usize,
    fingerprint: Vec<u32>,
}

impl State {
    fn remove(&mut self, h: &Hypergraph, w: u32) {
        debug_assert!(self.in_container[w as usize]);
        for &ei in h.incidence(w) {
            let e = h.edge(ei as usize);
            if e.iter().all(|&x| self.in_container[x as usize]) {
                self.edges -= 1;
                for &x in e {
                    self.degree[x as usize] -= 1;
                }
            }
        }
        self.in_container[w as usize] = false;
    }
}

struct Ctx<'a> {
    h: &'a Hypergraph,
    target: f64,
    cap: usize,
    max_containers: usize,
    produced: AtomicUsize,
    overflow: AtomicBool,
}

type Leaf = (Vec<u32>, Vec<u32>, bool);

/// Runs the fingerprint search on `h`.
pub fn build_containers(h: &Hypergraph, params: &ContainerParams) -> Result<ContainerFamily> {
    params.validate()?;
    if h.num_vertices() == 0 {
        return Err(Error::InvalidParams("hypergraph has no vertices".into()));
    }
    if h.r() < 2 {
        return Err(Error::InvalidParams(
            "containers need uniformity r ≥ 2".into(),
        ));
    }
    let state = initial(h);
    let ctx = Ctx {
        h,
        target: (1.0 - params.c) * h.num_edges() as f64,
        cap: params.cap_for(h),
        max_containers: params.max_containers,
        produced: AtomicUsize::new(0),
        overflow: AtomicBool::new(false),
    };
    let leaves = descend(&ctx, state);
    if ctx.overflow.load(Ordering::Relaxed) {
        return Err(Error::TooLarge {
            size: ctx.produced.load(Ordering::Relaxed) as u128,
            cap: params.max_containers as u128,
        });
    }
    Ok(assemble(h, *params, leaves))
}

fn descend(ctx: &Ctx, mut st: State) -> Vec<Leaf> {
    if ctx.overflow.load(Ordering::Relaxed) {
        return Vec::new();
    }
    let done_edges = st.edges as f64 <= ctx.target;
    let capped = st.fingerprint.len() >= ctx.cap;
    let pick = pick(&st);
    if done_edges || capped || pick.is_none() {
        if ctx.produced.fetch_add(1, Ordering::Relaxed) + 1 > ctx.max_containers {
            ctx.overflow.store(true, Ordering::Relaxed);
        }
        return vec![finish(st, capped && !done_edges)];
    }
    let v = pick.expect("checked");
    let h = ctx.h;
    let inc = include(h, &st, v);

    // v not in the independent set
    st.remove(h, v);

    let (mut a, b) = rayon::join(|| descend(ctx, inc), || descend(ctx, st));
    a.extend(b);
    a
}

/// Undecided vertex of largest degree, least index on ties.
fn pick(st: &State) -> Option<u32> {
    (0..st.degree.len())
        .filter(|&v| st.in_container[v] && !st.in_s[v])
        .max_by(|&a, &b| st.degree[a].cmp(&st.degree[b]).then(b.cmp(&a)))
        .map(|v| v as u32)
}

fn finish(st: State, truncated: bool) -> Leaf {
    let container = (0..st.in_container.len() as u32)
        .filter(|&v| st.in_container[v as usize])
        .collect();
    let mut fp = st.fingerprint;
    fp.sort_unstable();
    (fp, container, truncated)
}

/// Puts `v` into the independent set and drops every vertex that would
/// complete an edge with it.
fn include(h: &Hypergraph, st: &State, v: u32) -> State {
    let mut inc = State {
        in_container: st.in_container.clone(),
        in_s: st.in_s.clone(),
        degree: st.degree.clone(),
        edges: st.edges,
        fingerprint: st.fingerprint.clone(),
    };
    inc.in_s[v as usize] = true;
    inc.fingerprint.push(v);
    let mut forced = Vec::new();
    for &ei in h.incidence(v) {
        let e = h.edge(ei as usize);
        if !e.iter().all(|&x| inc.in_container[x as usize]) {
            continue;
        }
        let mut outside = e.iter().filter(|&&x| !inc.in_s[x as usize]);
        if let (Some(&w), None) = (outside.next(), outside.next()) {
            forced.push(w);
        }
    }
    forced.sort_unstable();
    forced.dedup();
    for w in forced {
        if inc.in_container[w as usize] {
            inc.remove(h, w);
        }
    }
    inc
}

fn initial(h: &Hypergraph) -> State {
    let n = h.num_vertices();
    State {
        in_container: vec![true; n],
        in_s: vec![false; n],
        degree: (0..n as u32).map(|v| h.degree(v) as u32).collect(),
        edges: h.num_edges(),
        fingerprint: Vec::new(),
    }
}

/// The container the search assigns to the independent set `set`: the
/// search path is followed by including exactly the vertices of `set`.
/// Returns `(fingerprint, container, truncated)`; the container is a member
/// of [`build_containers`]'s family and contains `set`.
pub fn container_of(
    h: &Hypergraph,
    params: &ContainerParams,
    set: &[u32],
) -> Result<(Vec<u32>, Vec<u32>, bool)> {
    params.validate()?;
    if !h.is_independent(set)? {
        return Err(Error::InvalidParams("set is not independent".into()));
    }
    let target = (1.0 - params.c) * h.num_edges() as f64;
    let cap = params.cap_for(h);
    let mut member = vec![false; h.num_vertices()];
    for &v in set {
        member[v as usize] = true;
    }
    let mut st = initial(h);
    loop {
        let done_edges = st.edges as f64 <= target;
        let capped = st.fingerprint.len() >= cap;
        match pick(&st) {
            Some(v) if !done_edges && !capped => {
                if member[v as usize] {
                    st = include(h, &st, v);
                } else {
                    st.remove(h, v);
                }
            }
            _ => return Ok(finish(st, capped && !done_edges)),
        }
    }
}

/// Orders leaves by fingerprint and merges equal containers, keeping the
/// least fingerprint.
fn assemble(h: &Hypergraph, params: ContainerParams, mut leaves: Vec<Leaf>) -> ContainerFamily {
    leaves.sort();
    let mut seen = std::collections::HashSet::new();
    let mut containers = Vec::new();
    let mut fingerprints = Vec::new();
    let mut truncated = Vec::new();
    for (fp, c, t) in leaves {
        if seen.insert(c.clone()) {
            fingerprints.push(fp);
            containers.push(c);
            truncated.push(t);
        }
    }
    let total = h.num_edges();
    let max_edge_fraction = if total == 0 {
        0.0
    } else {
        containers
            .iter()
            .map(|c| h.edges_within(c).unwrap_or(0) as f64 / total as f64)
            .fold(0.0, f64::max)
    };
    let stats = FamilyStats {
        count: containers.len(),
        log_count: (containers.len().max(1) as f64).ln(),
        max_container: containers.iter().map(Vec::len).max().unwrap_or(0),
        max_fingerprint: fingerprints.iter().map(Vec::len).max().unwrap_or(0),
        max_edge_fraction,
        truncated: truncated.iter().any(|&t| t),
    };
    ContainerFamily {
        params,
        containers,
        fingerprints,
        truncated,
        stats,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodegreeMargin {
    pub i: usize,
    pub delta: usize,
    /// `c τ^{i-1} |E| / |V|`.
    pub bound: f64,
    /// `bound - delta`; negative when the inequality fails.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodegreeCheck {
    pub holds: bool,
    pub per_i: Vec<CodegreeMargin>,
}

/// Evaluates `Δ_i(H) ≤ c τ^{i-1} |E|/|V|` for `2 ≤ i ≤ r`.
pub fn check_codegree_condition(h: &Hypergraph, tau: f64, c: f64) -> Result<CodegreeCheck> {
    if h.r() < 2 {
        return Err(Error::InvalidParams(
            "codegree condition needs r ≥ 2".into(),
        ));
    }
    let avg = if h.num_vertices() == 0 {
        0.0
    } else {
        h.num_edges() as f64 / h.num_vertices() as f64
    };
    let per_i: Vec<CodegreeMargin> = (2..=h.r())
        .map(|i| {
            let delta = h.max_codegree(i).expect("valid order");
            let bound = c * tau.powi(i as i32 - 1) * avg;
            CodegreeMargin {
                i,
                delta,
                bound,
                margin: bound - delta as f64,
            }
        })
        .collect();
    Ok(CodegreeCheck {
        holds: per_i.iter().all(|m| m.margin >= 0.0),
        per_i,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every independent set (|V| ≤ 24).
    Exhaustive,
    /// Random maximal independent sets from a seeded stream.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainerReport {
    pub sets_checked: usize,
    /// (a): every checked independent set lies in a container.
    pub a_pass: bool,
    pub a_witness: Option<Vec<u32>>,
    /// (c): every container spans at most `(1 - c)|E|` edges.
    pub c_pass: bool,
    pub c_violations: Vec<usize>,
    pub max_edge_fraction: f64,
    /// (b): `ln |family|` against `c^{-1} τ |V| ln(1/τ)`.
    pub b_log_count: f64,
    pub b_bound: f64,
    pub b_pass: bool,
}

/// Checks properties (a) and (c) of a family and measures (b).
pub fn verify_containers(
    h: &Hypergraph,
    fam: &ContainerFamily,
    mode: VerifyMode,
) -> Result<ContainerReport> {
    let n = h.num_vertices();
    let words = n.div_ceil(64).max(1);
    let to_bits = |s: &[u32]| {
        let mut b = vec![0u64; words];
        for &v in s {
            b[v as usize / 64] |= 1 << (v % 64);
        }
        b
    };
    let boxes: Vec<Vec<u64>> = fam.containers.iter().map(|c| to_bits(c)).collect();
    let covered = |set: &[u32]| {
        let bits = to_bits(set);
        boxes
            .iter()
            .any(|b| bits.iter().zip(b).all(|(x, y)| x & !y == 0))
    };
    let mut a_witness = None;
    let mut sets_checked = 0;
    match mode {
        VerifyMode::Exhaustive => {
            for mask in all_independent_sets(h)? {
                sets_checked += 1;
                let set = crate::hyper::mask_to_vec(mask);
                if !covered(&set) {
                    a_witness = Some(set);
                    break;
                }
            }
        }
        VerifyMode::Sampled { samples, seed } => {
            for i in 0..samples {
                let mut rng = RandomStream::derive(seed, i as u64);
                let set = h.random_maximal_independent(&mut rng);
                sets_checked += 1;
                if !covered(&set) {
                    a_witness = Some(set);
                    break;
                }
            }
        }
    }
    let total = h.num_edges() as f64;
    let limit = (1.0 - fam.params.c) * total;
    let mut c_violations = Vec::new();
    let mut max_edge_fraction: f64 = 0.0;
    for (i, c) in fam.containers.iter().enumerate() {
        let e = h.edges_within(c)? as f64;
        if total > 0.0 {
            max_edge_fraction = max_edge_fraction.max(e / total);
        }
        if e > limit {
            c_violations.push(i);
        }
    }
    let tau = fam.params.tau;
    let b_log_count = (fam.len().max(1) as f64).ln();
    let b_bound = tau * n as f64 * (1.0 / tau).ln() / fam.params.c;
    Ok(ContainerReport {
        sets_checked,
        a_pass: a_witness.is_none(),
        a_witness,
        c_pass: c_violations.is_empty(),
        c_violations,
        max_edge_fraction,
        b_log_count,
        b_bound,
        b_pass: b_log_count <= b_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::{complete, fano};

    #[test]
    fn edgeless_gives_one_container() {
        let h = Hypergraph::new(3, 5, vec![]).unwrap();
        let fam = build_containers(&h, &ContainerParams::new(0.3, 0.1)).unwrap();
        assert_eq!(fam.containers, vec![vec![0, 1, 2, 3, 4]]);
        assert_eq!(fam.fingerprints, vec![Vec::<u32>::new()]);
        let rep = verify_containers(&h, &fam, VerifyMode::Exhaustive).unwrap();
        assert!(rep.a_pass && rep.c_pass);
    }

    #[test]
    fn complete_design_containers() {
        let h = complete(3, 6);
        let fam = build_containers(&h, &ContainerParams::new(0.4, 0.1)).unwrap();
        let rep = verify_containers(&h, &fam, VerifyMode::Exhaustive).unwrap();
        assert_eq!(rep.sets_checked, 1 + 6 + 15);
        assert!(rep.a_pass && rep.c_pass, "{rep:?}");
        for (f, c) in fam.fingerprints.iter().zip(&fam.containers) {
            assert!(f.iter().all(|v| c.contains(v)));
            assert!(h.is_independent(f).unwrap());
        }
    }

    #[test]
    fn fano_containers() {
        let h = fano();
        let fam = build_containers(&h, &ContainerParams::new(0.45, 0.05)).unwrap();
        let rep = verify_containers(&h, &fam, VerifyMode::Exhaustive).unwrap();
        assert!(rep.a_pass && rep.c_pass);
        let again = build_containers(&h, &ContainerParams::new(0.45, 0.05)).unwrap();
        assert_eq!(fam, again);
    }

    #[test]
    fn missing_container_is_reported() {
        let h = fano();
        let mut fam = build_containers(&h, &ContainerParams::new(0.45, 0.05)).unwrap();
        fam.containers = vec![vec![0, 1, 2, 3]];
        fam.fingerprints = vec![vec![]];
        let rep = verify_containers(&h, &fam, VerifyMode::Exhaustive).unwrap();
        assert!(!rep.a_pass);
        let w = rep.a_witness.unwrap();
        assert!(h.is_independent(&w).unwrap());
        assert!(!w.iter().all(|v| [0, 1, 2, 3].contains(v)));
    }

    #[test]
    fn invalid_params() {
        let h = fano();
        assert!(build_containers(&h, &ContainerParams::new(0.5, 0.1)).is_err());
        assert!(build_containers(&h, &ContainerParams::new(0.2, 0.0)).is_err());
    }

    #[test]
    fn codegree_condition_examples() {
        let h = Hypergraph::new(3, 4, vec![]).unwrap();
        assert!(check_codegree_condition(&h, 0.1, 0.1).unwrap().holds);
        let single = Hypergraph::new(3, 10, vec![vec![0, 1, 2]]).unwrap();
        let chk = check_codegree_condition(&single, 0.01, 0.5).unwrap();
        assert!(!chk.holds);
        assert!(chk.per_i[0].margin < 0.0);
    }

    #[test]
    fn text_round_trip() {
        let h = fano();
        let params = ContainerParams::new(0.45, 0.05);
        let fam = build_containers(&h, &params).unwrap();
        assert_eq!(
            ContainerFamily::parse_text(&fam.to_text(), &h, params).unwrap(),
            fam
        );
    }
}
