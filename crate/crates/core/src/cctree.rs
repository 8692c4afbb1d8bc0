//! Container-clique trees.
//!
//! Every node carries a label sequence `C_0, C_1, ..., C_l`: `C_0` is the
//! current container and `C_1..` are cliques collected along the way. A
//! node only stores the cliques it appended; the full sequence is the
//! concatenation along the root path.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::container::{build_containers, ContainerParams};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::geom::{self, Flat, IncidenceIndex, PointSet, Space};
use crate::hyper::{all_independent_sets, mask_to_vec, Hypergraph};
use crate::poly::binomial;
use crate::rng::RandomStream;

/// Default cap on tree nodes before a build reports non-termination.
pub const DEFAULT_MAX_NODES: usize = 200_000;
/// Largest τ handed to the container step.
pub const TAU_CLAMP: f64 = 0.49;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeCase {
    Root,
    /// `C_0` produced by rich-object deletion (case (i)).
    Deletion,
    /// `C_0` produced by the container step (case (ii)).
    Container,
}

impl NodeCase {
    fn as_str(self) -> &'static str {
        match self {
            NodeCase::Root => "root",
            NodeCase::Deletion => "deletion",
            NodeCase::Container => "container",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "root" => Ok(NodeCase::Root),
            "deletion" => Ok(NodeCase::Deletion),
            "container" => Ok(NodeCase::Container),
            _ => Err(Error::Parse(format!("unknown node case `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<usize>,
    pub depth: usize,
    pub case: NodeCase,
    /// Sorted vertex list.
    pub c0: Vec<u32>,
    /// Cliques appended when this node was created.
    pub appended: Vec<Vec<u32>>,
    /// `ℓ_x`, the number of cliques in the full label.
    pub label_len: usize,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CCTree {
    pub nodes: Vec<Node>,
}

impl CCTree {
    /// Single root labelled `(V)`.
    pub fn root(vertices: Vec<u32>) -> Self {
        CCTree {
            nodes: vec![Node {
                parent: None,
                depth: 0,
                case: NodeCase::Root,
                c0: vertices,
                appended: Vec::new(),
                label_len: 0,
                children: Vec::new(),
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Appends a child and returns its id.
    pub fn push_child(
        &mut self,
        parent: usize,
        case: NodeCase,
        c0: Vec<u32>,
        appended: Vec<Vec<u32>>,
    ) -> usize {
        let id = self.nodes.len();
        let p = &self.nodes[parent];
        let node = Node {
            parent: Some(parent),
            depth: p.depth + 1,
            case,
            c0,
            label_len: p.label_len + appended.len(),
            appended,
            children: Vec::new(),
        };
        self.nodes.push(node);
        self.nodes[parent].children.push(id);
        id
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].children.is_empty())
    }

    /// Labels `C_1, ..., C_l` of a node, root-most first.
    pub fn cliques(&self, x: usize) -> Vec<&[u32]> {
        let mut chain = Vec::new();
        let mut cur = Some(x);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.nodes[i].parent;
        }
        chain
            .iter()
            .rev()
            .flat_map(|&i| self.nodes[i].appended.iter().map(Vec::as_slice))
            .collect()
    }

    /// Line format `node_id parent_id case {C0} | {C1} | ...`, followed by
    /// the statistics as one JSON line.
    pub fn to_text(&self, r: usize) -> Result<String> {
        let set = |s: &[u32]| {
            format!(
                "{{{}}}",
                s.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
            )
        };
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let parent = node.parent.map_or("-".to_string(), |p| p.to_string());
            let mut labels = vec![set(&node.c0)];
            labels.extend(self.cliques(id).into_iter().map(set));
            writeln!(
                out,
                "{id} {parent} {} {}",
                node.case.as_str(),
                labels.join(" | ")
            )
            .expect("string");
        }
        out.push_str(&serde_json::to_string(&tree_stats(self, r))?);
        out.push('\n');
        Ok(out)
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let parse_set = |t: &str| -> Result<Vec<u32>> {
            let inner = t
                .trim()
                .strip_prefix('{')
                .and_then(|x| x.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("bad set `{t}`")))?;
            inner
                .split_whitespace()
                .map(|x| {
                    x.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("{x}: {e}")))
                })
                .collect()
        };
        let mut tree = CCTree::default();
        for line in s
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('{'))
        {
            let mut head = line.splitn(4, ' ');
            let (id, parent, case, rest) = (head.next(), head.next(), head.next(), head.next());
            let (Some(id), Some(parent), Some(case), Some(rest)) = (id, parent, case, rest) else {
                return Err(Error::Parse(format!("bad tree line `{line}`")));
            };
            let id: usize = id.parse().map_err(|e| Error::Parse(format!("{id}: {e}")))?;
            if id != tree.nodes.len() {
                return Err(Error::Parse(format!(
                    "node ids must be consecutive, got {id}"
                )));
            }
            let labels = rest.split('|').map(parse_set).collect::<Result<Vec<_>>>()?;
            let (c0, cliques) = labels
                .split_first()
                .ok_or_else(|| Error::Parse("missing C0".into()))?;
            let case = NodeCase::parse(case)?;
            if parent == "-" {
                if !tree.nodes.is_empty() {
                    return Err(Error::Parse("second root".into()));
                }
                let mut t = CCTree::root(c0.clone());
                t.nodes[0].case = case;
                t.nodes[0].appended = cliques.to_vec();
                t.nodes[0].label_len = cliques.len();
                tree = t;
            } else {
                let p: usize = parent
                    .parse()
                    .map_err(|e| Error::Parse(format!("{parent}: {e}")))?;
                if p >= id {
                    return Err(Error::Parse(format!("parent {p} of node {id} comes later")));
                }
                let inherited = tree.nodes[p].label_len;
                if cliques.len() < inherited {
                    return Err(Error::Parse(format!("node {id} drops inherited labels")));
                }
                tree.push_child(p, case, c0.clone(), cliques[inherited..].to_vec());
            }
        }
        Ok(tree)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeStats {
    pub nu: usize,
    pub chi: usize,
    pub kappa: usize,
    pub lambda: usize,
    pub height: usize,
    /// `log2 ν + λ log2 C(κ, r) + χ + r λ`, with `C(κ, r)` read as at least 1.
    pub aleph_log2: f64,
    pub nodes: usize,
}

pub fn tree_stats(t: &CCTree, r: usize) -> TreeStats {
    let leaves: Vec<usize> = t.leaves().collect();
    let nu = leaves.len();
    let chi = leaves
        .iter()
        .map(|&x| t.nodes[x].c0.len())
        .max()
        .unwrap_or(0);
    let kappa = t
        .nodes
        .iter()
        .flat_map(|n| n.appended.iter().map(Vec::len))
        .max()
        .unwrap_or(0);
    let lambda = t.nodes.iter().map(|n| n.label_len).max().unwrap_or(0);
    let height = t.nodes.iter().map(|n| n.depth).max().unwrap_or(0);
    let choose = binomial(kappa as u64, r as u64).max(1) as f64;
    let aleph_log2 = (nu.max(1) as f64).log2()
        + lambda as f64 * choose.log2()
        + chi as f64
        + (r * lambda) as f64;
    TreeStats {
        nu,
        chi,
        kappa,
        lambda,
        height,
        aleph_log2,
        nodes: t.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeVerifyMode {
    /// Every independent set (|V| ≤ 24).
    Exhaustive,
    /// Random maximal independent sets from a seeded stream.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeReport {
    /// Property 1: one root, parents precede children, labels inside V(H).
    pub structure_pass: bool,
    pub structure_error: Option<String>,
    /// Property 2: every `C_i`, `i ≥ 1`, is a clique.
    pub cliques_checked: usize,
    pub clique_pass: bool,
    pub clique_witness: Option<(usize, Vec<u32>)>,
    /// Property 3: every checked independent set lies in a leaf.
    pub sets_checked: usize,
    pub cover_pass: bool,
    pub cover_witness: Option<Vec<u32>>,
}

impl TreeReport {
    pub fn pass(&self) -> bool {
        self.structure_pass && self.clique_pass && self.cover_pass
    }
}

/// Checks the three defining properties of a container-clique tree. Labels
/// are vertex labels of `h` (point indices for geometric hypergraphs).
pub fn verify_cctree(t: &CCTree, h: &Hypergraph, mode: TreeVerifyMode) -> Result<TreeReport> {
    let n = h.num_vertices();
    let to_local = |s: &[u32]| -> Option<Vec<u32>> { s.iter().map(|&l| h.vertex_of(l)).collect() };
    let mut structure_error = None;
    let roots = t.nodes.iter().filter(|x| x.parent.is_none()).count();
    if roots != 1 || t.nodes.first().map_or(true, |x| x.parent.is_some()) {
        structure_error = Some(format!("expected exactly one root at id 0, found {roots}"));
    }
    for (id, node) in t.nodes.iter().enumerate() {
        if structure_error.is_some() {
            break;
        }
        if let Some(p) = node.parent {
            if p >= id || !t.nodes[p].children.contains(&id) {
                structure_error = Some(format!("node {id} has inconsistent parent {p}"));
            } else if node.label_len != t.nodes[p].label_len + node.appended.len() {
                structure_error = Some(format!("node {id} does not extend its parent's label"));
            }
        }
        if to_local(&node.c0).is_none() || node.appended.iter().any(|k| to_local(k).is_none()) {
            structure_error = Some(format!("node {id} has a label outside V(H)"));
        }
    }
    if let Some(e) = structure_error {
        return Ok(TreeReport {
            structure_pass: false,
            structure_error: Some(e),
            cliques_checked: 0,
            clique_pass: false,
            clique_witness: None,
            sets_checked: 0,
            cover_pass: false,
            cover_witness: None,
        });
    }

    // every clique label is stored once, at the node that appended it
    let clique_list: Vec<(usize, &Vec<u32>)> = t
        .nodes
        .iter()
        .enumerate()
        .flat_map(|(id, node)| node.appended.iter().map(move |k| (id, k)))
        .collect();
    let bad: Vec<Option<(usize, Vec<u32>)>> = clique_list
        .par_iter()
        .map(|&(id, k)| {
            let local = to_local(k).expect("checked");
            match h.is_clique(&local) {
                Ok(true) => None,
                _ => Some((id, k.clone())),
            }
        })
        .collect();
    let clique_witness = bad.into_iter().flatten().next();

    let words = n.div_ceil(64).max(1);
    let bits_of = |labels: &[u32], b: &mut Vec<u64>| {
        for &l in labels {
            let v = h.vertex_of(l).expect("checked") as usize;
            b[v / 64] |= 1 << (v % 64);
        }
    };
    // union of each node's label; parents precede children
    let mut clique_union: Vec<Vec<u64>> = Vec::with_capacity(t.len());
    let mut unions: Vec<Vec<u64>> = Vec::with_capacity(t.len());
    for node in &t.nodes {
        let mut k = node
            .parent
            .map_or_else(|| vec![0u64; words], |p| clique_union[p].clone());
        for c in &node.appended {
            bits_of(c, &mut k);
        }
        let mut u = k.clone();
        bits_of(&node.c0, &mut u);
        clique_union.push(k);
        unions.push(u);
    }
    let contains = |set: &[u32]| -> bool {
        let mut b = vec![0u64; words];
        for &v in set {
            b[v as usize / 64] |= 1 << (v % 64);
        }
        let inside = |x: usize| b.iter().zip(&unions[x]).all(|(s, u)| s & !u == 0);
        // descend only into nodes whose label contains the set
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            if !inside(x) {
                continue;
            }
            if t.nodes[x].children.is_empty() {
                return true;
            }
            stack.extend(t.nodes[x].children.iter().rev());
        }
        false
    };
    let mut sets_checked = 0;
    let cover_witness = match mode {
        TreeVerifyMode::Exhaustive => {
            let mut witness = None;
            for mask in all_independent_sets(h)? {
                sets_checked += 1;
                let set = mask_to_vec(mask);
                if !contains(&set) {
                    witness = Some(set.iter().map(|&v| h.label(v)).collect());
                    break;
                }
            }
            witness
        }
        TreeVerifyMode::Sampled { samples, seed } => {
            sets_checked = samples;
            let misses: Vec<Option<Vec<u32>>> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = RandomStream::derive(seed, i as u64);
                    let set = h.random_maximal_independent(&mut rng);
                    (!contains(&set)).then(|| set.iter().map(|&v| h.label(v)).collect())
                })
                .collect();
            misses.into_iter().flatten().next()
        }
    };
    Ok(TreeReport {
        structure_pass: true,
        structure_error: None,
        cliques_checked: clique_list.len(),
        clique_pass: clique_witness.is_none(),
        clique_witness,
        sets_checked,
        cover_pass: cover_witness.is_none(),
        cover_witness,
    })
}

/// What happened at an expanded node.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeLog {
    pub node: usize,
    pub depth: usize,
    pub case: NodeCase,
    pub c0_size: usize,
    /// `|C|` after rich deletions.
    pub c_size: usize,
    pub deleted: usize,
    /// Edges of `H[C_0]` at this node.
    pub edges: usize,
    pub tau: Option<f64>,
    pub tau_clamped: bool,
    pub family_size: usize,
    pub truncated_containers: usize,
    pub children: Vec<usize>,
    pub retries: usize,
    pub p_clamped: usize,
}

#[derive(Clone, Debug)]
pub struct BuildOutput {
    pub tree: CCTree,
    pub stats: TreeStats,
    pub log: Vec<NodeLog>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CollinearParams {
    pub eps: f64,
    pub c_prime: f64,
    pub c: f64,
    pub max_nodes: usize,
    pub max_containers: usize,
}

impl CollinearParams {
    pub fn new(eps: f64, c_prime: f64, c: f64) -> Self {
        CollinearParams {
            eps,
            c_prime,
            c,
            max_nodes: DEFAULT_MAX_NODES,
            max_containers: crate::container::DEFAULT_MAX_CONTAINERS,
        }
    }
}

/// Result of repeatedly deleting rich flats from `C_0`.
struct Deletion {
    c: Vec<u32>,
    cliques: Vec<Vec<u32>>,
    /// Stopped because `C` became small (case (i)).
    small: bool,
}

/// Deletes `C ∩ F` for the richest flat while `|C ∩ F| ≥ |C_0| / √q`,
/// until `|C| < floor_size` or no rich flat is left.
fn delete_rich(index: &IncidenceIndex, c0: &[u32], floor_size: f64) -> Deletion {
    let q = index.space().q() as f64;
    let threshold = c0.len() as f64 / q.sqrt();
    let mut c: Vec<u32> = c0.to_vec();
    let mut cliques = Vec::new();
    loop {
        let Some((f, count)) = index.richest(&c) else {
            break;
        };
        if count == 0 || (count as f64) < threshold {
            break;
        }
        let members = index.members(f);
        let (k, rest): (Vec<u32>, Vec<u32>) =
            c.iter().partition(|v| members.binary_search(v).is_ok());
        cliques.push(k);
        c = rest;
        if (c.len() as f64) < floor_size {
            return Deletion {
                c,
                cliques,
                small: true,
            };
        }
    }
    Deletion {
        c,
        cliques,
        small: false,
    }
}

struct Expansion {
    children: Vec<(NodeCase, Vec<u32>, Vec<Vec<u32>>)>,
    log: NodeLog,
}

/// Runs the collinear-triple process on `F_q^2`: nodes with
/// `|C_0| ≥ (1+ε) q` are expanded by rich-line deletion or by containers of
/// `H[C]` with `τ = c' √q / |C|`.
pub fn build_collinear_cctree(ctx: &FieldCtx, params: &CollinearParams) -> Result<BuildOutput> {
    if params.eps <= 0.0 || params.c_prime <= 0.0 {
        return Err(Error::InvalidParams("eps and c' must be positive".into()));
    }
    if ctx.q() < 9 {
        return Err(Error::InvalidParams(format!("q = {} is below 9", ctx.q())));
    }
    let space = Space::new(ctx.clone(), 2)?;
    let full = PointSet::full(space.clone());
    let h = Hypergraph::collinear_triples(&full)?;
    let index = IncidenceIndex::new(&space, 1)?;
    let q = ctx.q() as f64;
    let stop = (1.0 + params.eps) * q;
    let expand = |node: usize, depth: usize, c0: &[u32]| -> Result<Option<Expansion>> {
        if (c0.len() as f64) < stop {
            return Ok(None);
        }
        let floor_size = (c0.len() as f64 / 2.0).max(stop);
        let del = delete_rich(&index, c0, floor_size);
        let edges = h.edges_within(c0)?;
        let mut log = NodeLog {
            node,
            depth,
            case: NodeCase::Deletion,
            c0_size: c0.len(),
            c_size: del.c.len(),
            deleted: del.cliques.len(),
            edges,
            tau: None,
            tau_clamped: false,
            family_size: 1,
            truncated_containers: 0,
            children: Vec::new(),
            retries: 0,
            p_clamped: 0,
        };
        if del.small {
            return Ok(Some(Expansion {
                children: vec![(NodeCase::Deletion, del.c, del.cliques)],
                log,
            }));
        }
        let sub = h.induced(&del.c)?;
        let raw_tau = params.c_prime * q.sqrt() / del.c.len() as f64;
        let tau = raw_tau.min(TAU_CLAMP);
        let mut cp = ContainerParams::new(tau, params.c);
        cp.max_containers = params.max_containers;
        let fam = build_containers(&sub, &cp)?;
        log.case = NodeCase::Container;
        log.tau = Some(tau);
        log.tau_clamped = raw_tau > TAU_CLAMP;
        log.family_size = fam.len();
        log.truncated_containers = fam.truncated.iter().filter(|&&t| t).count();
        let children = fam
            .containers
            .iter()
            .map(|c| {
                let labels: Vec<u32> = c.iter().map(|&v| sub.label(v)).collect();
                (NodeCase::Container, labels, del.cliques.clone())
            })
            .collect();
        Ok(Some(Expansion { children, log }))
    };
    grow(
        full.indices().to_vec(),
        params.max_nodes,
        3,
        |node, depth, c0, _| expand(node, depth, c0),
    )
}

/// One root-to-leaf path of the collinear tree, found without building the
/// rest of the tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracedPath {
    /// `|C_0|` and case of every node on the path, root first.
    pub sizes: Vec<usize>,
    pub cases: Vec<NodeCase>,
    pub leaf_c0: Vec<u32>,
    pub cliques: Vec<Vec<u32>>,
    /// The traced set lies in the leaf's label.
    pub contained: bool,
}

/// Follows an independent set `set` of point indices through the collinear
/// process. At a container step the child is the container the search
/// assigns to `set ∩ C`, which is a child of the full tree as well.
pub fn trace_collinear(
    ctx: &FieldCtx,
    params: &CollinearParams,
    h: &Hypergraph,
    set: &[u32],
) -> Result<TracedPath> {
    let space = Space::new(ctx.clone(), 2)?;
    let index = IncidenceIndex::new(&space, 1)?;
    let q = ctx.q() as f64;
    let stop = (1.0 + params.eps) * q;
    let mut c0: Vec<u32> = (0..space.size()).collect();
    let mut sizes = vec![c0.len()];
    let mut cases = vec![NodeCase::Root];
    let mut cliques: Vec<Vec<u32>> = Vec::new();
    while (c0.len() as f64) >= stop {
        if sizes.len() > space.size() as usize + 1 {
            return Err(Error::NonTermination {
                ops: sizes.len(),
                detail: "path longer than the number of points".into(),
            });
        }
        let floor_size = (c0.len() as f64 / 2.0).max(stop);
        let del = delete_rich(&index, &c0, floor_size);
        cliques.extend(del.cliques);
        if del.small {
            c0 = del.c;
            cases.push(NodeCase::Deletion);
        } else {
            let sub = h.induced(&del.c)?;
            let tau = (params.c_prime * q.sqrt() / del.c.len() as f64).min(TAU_CLAMP);
            let cp = ContainerParams::new(tau, params.c);
            let local: Vec<u32> = set.iter().filter_map(|&l| sub.vertex_of(l)).collect();
            let (_, container, _) = crate::container::container_of(&sub, &cp, &local)?;
            let next: Vec<u32> = container.iter().map(|&v| sub.label(v)).collect();
            if next == c0 {
                return Err(Error::NonTermination {
                    ops: sizes.len(),
                    detail: "container step made no progress".into(),
                });
            }
            c0 = next;
            cases.push(NodeCase::Container);
        }
        sizes.push(c0.len());
    }
    let contained = set
        .iter()
        .all(|x| c0.binary_search(x).is_ok() || cliques.iter().any(|k| k.binary_search(x).is_ok()));
    Ok(TracedPath {
        sizes,
        cases,
        leaf_c0: c0,
        cliques,
        contained,
    })
}

/// Level-synchronous growth: every node of a level is expanded in
/// parallel, children are numbered in parent order.
fn grow<F>(root: Vec<u32>, max_nodes: usize, r: usize, expand: F) -> Result<BuildOutput>
where
    F: Fn(usize, usize, &[u32], &[Vec<u32>]) -> Result<Option<Expansion>> + Sync,
{
    let mut tree = CCTree::root(root);
    let mut log = Vec::new();
    let mut frontier = vec![0usize];
    let mut ops = 0usize;
    while !frontier.is_empty() {
        let results: Vec<Result<Option<Expansion>>> = frontier
            .par_iter()
            .map(|&x| {
                let node = &tree.nodes[x];
                expand(x, node.depth, &node.c0, &node.appended)
            })
            .collect();
        let mut next = Vec::new();
        for (&x, res) in frontier.iter().zip(results) {
            let Some(mut exp) = res? else { continue };
            ops += 1;
            if exp.children.len() == 1
                && exp.children[0].1 == tree.nodes[x].c0
                && exp.children[0].2.is_empty()
            {
                return Err(Error::NonTermination {
                    ops,
                    detail: format!(
                        "node {x} (|C0| = {}, depth {}) produced itself as its only child",
                        tree.nodes[x].c0.len(),
                        tree.nodes[x].depth
                    ),
                });
            }
            if tree.len() + exp.children.len() > max_nodes {
                return Err(Error::NonTermination {
                    ops,
                    detail: diagnostic(&tree, &frontier, x, exp.children.len(), max_nodes),
                });
            }
            for (case, c0, appended) in exp.children {
                let id = tree.push_child(x, case, c0, appended);
                exp.log.children.push(id);
                next.push(id);
            }
            log.push(exp.log);
        }
        frontier = next;
    }
    let stats = tree_stats(&tree, r);
    Ok(BuildOutput { tree, stats, log })
}

fn diagnostic(tree: &CCTree, frontier: &[usize], at: usize, pending: usize, cap: usize) -> String {
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in frontier {
        *sizes.entry(tree.nodes[x].c0.len()).or_insert(0) += 1;
    }
    let depth = tree.nodes[at].depth;
    format!(
        "node cap {cap} reached at node {at} (depth {depth}, |C0| = {}) wanting {pending} children; \
         tree has {} nodes; frontier of {} nodes has |C0| histogram {:?}",
        tree.nodes[at].c0.len(),
        tree.len(),
        frontier.len(),
        sizes
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupersatParams {
    pub k: usize,
    pub r: usize,
    pub theta: f64,
    /// Always `1 / (2r)`.
    pub epsilon: f64,
    /// Container constant `c` the certificate measures against.
    pub c: f64,
    /// Below `sparse_fraction · m^k` general-position k-sets, all (k,r)-sets
    /// of P become edges.
    pub sparse_fraction: f64,
}

impl SupersatParams {
    pub fn new(k: usize, r: usize, theta: f64, c: f64) -> Self {
        SupersatParams {
            k,
            r,
            theta,
            epsilon: 1.0 / (2.0 * r as f64),
            c,
            sparse_fraction: 1.0 / (2.0 * (r as f64).powi(k as i32)),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 || self.r <= self.k {
            return Err(Error::InvalidParams(format!(
                "need r > k ≥ 1, got k = {}, r = {}",
                self.k, self.r
            )));
        }
        if self.theta < 1.0 {
            return Err(Error::InvalidParams(format!(
                "theta = {} below 1",
                self.theta
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaCertificate {
    pub m: usize,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub theta: f64,
    pub epsilon: f64,
    pub c: f64,
    /// `θ q^{n-k} / (m q^ε)`.
    pub tau: f64,
    pub vertices: usize,
    pub edges: usize,
    pub general_position_sets: u128,
    pub sparse_fallback: bool,
    /// `(K, F)` pairs whose inclusion probability exceeded 1.
    pub p_clamped: usize,
    /// `[Δ_1, ..., Δ_r]`.
    pub deltas: Vec<usize>,
    /// `θ |E|/|V|` for `i = 1`, `c τ^{i-1} |E|/|V|` for `i ≥ 2`.
    pub targets: Vec<f64>,
    pub margins: Vec<f64>,
    pub holds: Vec<bool>,
    /// Smallest θ' with `Δ_1 ≤ θ' |E|/|V|`.
    pub theta_min: f64,
}

/// Randomized (k,r)-set hypergraph on `P` with codegree certificate.
pub fn supersat_hypergraph(
    p: &PointSet,
    params: &SupersatParams,
    rng: &mut RandomStream,
) -> Result<(Hypergraph, DeltaCertificate)> {
    params.validate()?;
    let space = p.space();
    let (n, k, r) = (space.n(), params.k, params.r);
    if k >= n {
        return Err(Error::InvalidParams(format!(
            "need k < n, got k = {k}, n = {n}"
        )));
    }
    let q = space.q();
    let m = p.len();
    let slices = (q as f64).powi((n - k) as i32);
    let needed = params.theta * slices;
    if (m as f64) < needed {
        return Err(Error::TooSmall { m, needed });
    }
    let limit = 2.0 * m as f64 / (q as f64).sqrt();
    let prof = geom::incidence_profile(p, k)?;
    if prof.max_count as f64 > limit {
        return Err(Error::RichFlatPresent {
            flat: prof.argmax,
            count: prof.max_count,
            limit,
        });
    }
    let pts = p.indices();
    // general-position k-sets: affinely independent
    let g: Vec<Vec<u32>> = geom::combinations(m, k)
        .into_iter()
        .map(|c| c.into_iter().map(|i| pts[i]).collect::<Vec<u32>>())
        .filter(|kset| geom::span_dim(space, kset) == k - 1)
        .collect();
    let g_size = g.len() as u128;
    let sparse = (g_size as f64) < params.sparse_fraction * (m as f64).powi(k as i32);
    let mut p_clamped = 0;
    let edges: Vec<Vec<u32>> = if sparse {
        let all = Hypergraph::krsets(p, k, r)?;
        all.edges()
            .map(|e| e.iter().map(|&v| all.label(v)).collect())
            .collect()
    } else {
        let mut edges = Vec::new();
        let ratio = m as f64 / slices;
        for kset in &g {
            let gk = geom::span_indices(space, kset)?;
            // points of P off G_K, grouped by the k-flat span(K ∪ {w})
            let mut by_flat: BTreeMap<Flat, Vec<u32>> = BTreeMap::new();
            for &w in pts {
                if gk.contains_index(space, w) {
                    continue;
                }
                let mut with_w = kset.clone();
                with_w.push(w);
                by_flat
                    .entry(geom::span_indices(space, &with_w)?)
                    .or_default()
                    .push(w);
            }
            for (_, outside) in by_flat {
                let mkf = outside.len();
                if (mkf as f64) < ratio / 3.0 {
                    continue;
                }
                let raw = (ratio / mkf as f64).powi((r - k - 1) as i32);
                if raw > 1.0 {
                    p_clamped += 1;
                }
                let prob = raw.min(1.0);
                for s in geom::combinations(mkf, r - k) {
                    let u = rng.unit();
                    if u < prob {
                        let mut e = kset.clone();
                        e.extend(s.iter().map(|&j| outside[j]));
                        edges.push(e);
                    }
                }
            }
        }
        edges
    };
    let h = Hypergraph::from_labelled_edges(r, pts.to_vec(), edges)?;
    let cert = certify(&h, space, params, g_size, sparse, p_clamped);
    Ok((h, cert))
}

fn certify(
    h: &Hypergraph,
    space: &Space,
    params: &SupersatParams,
    g_size: u128,
    sparse: bool,
    p_clamped: usize,
) -> DeltaCertificate {
    let m = h.num_vertices();
    let (n, k, r) = (space.n(), params.k, params.r);
    let q = space.q();
    let slices = (q as f64).powi((n - k) as i32);
    let tau = params.theta * slices / (m as f64 * (q as f64).powf(params.epsilon));
    let avg = h.num_edges() as f64 / m.max(1) as f64;
    let deltas = h.codegrees();
    let targets: Vec<f64> = (1..=r)
        .map(|i| {
            if i == 1 {
                params.theta * avg
            } else {
                params.c * tau.powi(i as i32 - 1) * avg
            }
        })
        .collect();
    let margins: Vec<f64> = targets
        .iter()
        .zip(&deltas)
        .map(|(t, &d)| t - d as f64)
        .collect();
    let holds = margins.iter().map(|&x| x >= 0.0).collect();
    let theta_min = if avg > 0.0 {
        deltas[0] as f64 / avg
    } else {
        0.0
    };
    DeltaCertificate {
        m,
        q,
        n,
        k,
        r,
        theta: params.theta,
        epsilon: params.epsilon,
        c: params.c,
        tau,
        vertices: m,
        edges: h.num_edges(),
        general_position_sets: g_size,
        sparse_fallback: sparse,
        p_clamped,
        deltas,
        targets,
        margins,
        holds,
        theta_min,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KrParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub theta: f64,
    pub c: f64,
    pub seed: u64,
    pub max_nodes: usize,
    pub max_containers: usize,
    /// Fresh random streams tried when the supersaturation step fails.
    pub max_retries: usize,
}

impl KrParams {
    pub fn new(n: usize, k: usize, r: usize, theta: f64, c: f64, seed: u64) -> Self {
        KrParams {
            n,
            k,
            r,
            theta,
            c,
            seed,
            max_nodes: DEFAULT_MAX_NODES,
            max_containers: crate::container::DEFAULT_MAX_CONTAINERS,
            max_retries: 3,
        }
    }
}

/// Runs the (k,r)-set process on `F_q^n`: nodes with `|C_0| ≥ 2θ q^{n-k}`
/// are expanded by rich k-flat deletion or by containers of the randomized
/// supersaturation hypergraph of `C`.
pub fn build_krset_cctree(ctx: &FieldCtx, params: &KrParams) -> Result<BuildOutput> {
    let sp = SupersatParams::new(params.k, params.r, params.theta, params.c);
    sp.validate()?;
    if params.k >= params.n {
        return Err(Error::InvalidParams(format!(
            "need k < n, got k = {}, n = {}",
            params.k, params.n
        )));
    }
    let space = Space::new(ctx.clone(), params.n)?;
    let index = IncidenceIndex::new(&space, params.k)?;
    let q = ctx.q() as f64;
    let stop = 2.0 * params.theta * q.powi((params.n - params.k) as i32);
    let root: Vec<u32> = (0..space.size()).collect();
    let expand =
        |node: usize, depth: usize, c0: &[u32], _: &[Vec<u32>]| -> Result<Option<Expansion>> {
            if (c0.len() as f64) < stop {
                return Ok(None);
            }
            let del = delete_rich(&index, c0, c0.len() as f64 / 2.0);
            let mut log = NodeLog {
                node,
                depth,
                case: NodeCase::Deletion,
                c0_size: c0.len(),
                c_size: del.c.len(),
                deleted: del.cliques.len(),
                edges: 0,
                tau: None,
                tau_clamped: false,
                family_size: 1,
                truncated_containers: 0,
                children: Vec::new(),
                retries: 0,
                p_clamped: 0,
            };
            if del.small {
                return Ok(Some(Expansion {
                    children: vec![(NodeCase::Deletion, del.c, del.cliques)],
                    log,
                }));
            }
            let c_set = PointSet::from_sorted(space.clone(), del.c.clone());
            let mut attempt = 0;
            let (sub, cert, fam) = loop {
                let mut rng =
                    RandomStream::derive(params.seed, ((node as u64) << 8) | attempt as u64);
                let res = supersat_hypergraph(&c_set, &sp, &mut rng).and_then(|(sub, cert)| {
                    let raw_tau = cert.tau;
                    let mut cp = ContainerParams::new(raw_tau.min(TAU_CLAMP), params.c);
                    cp.max_containers = params.max_containers;
                    let fam = build_containers(&sub, &cp)?;
                    if fam.len() == 1 && fam.containers[0].len() == sub.num_vertices() {
                        return Err(Error::NonTermination {
                            ops: node,
                            detail: "container step made no progress".into(),
                        });
                    }
                    Ok((sub, cert, fam))
                });
                match res {
                    Ok(v) => break v,
                    Err(e) if attempt < params.max_retries && retryable(&e) => attempt += 1,
                    Err(e) => return Err(e),
                }
            };
            log.case = NodeCase::Container;
            log.edges = sub.num_edges();
            log.tau = Some(cert.tau.min(TAU_CLAMP));
            log.tau_clamped = cert.tau > TAU_CLAMP;
            log.family_size = fam.len();
            log.truncated_containers = fam.truncated.iter().filter(|&&t| t).count();
            log.retries = attempt;
            log.p_clamped = cert.p_clamped;
            let children = fam
                .containers
                .iter()
                .map(|c| {
                    let labels: Vec<u32> = c.iter().map(|&v| sub.label(v)).collect();
                    (NodeCase::Container, labels, del.cliques.clone())
                })
                .collect();
            Ok(Some(Expansion { children, log }))
        };
    grow(root, params.max_nodes, params.r, expand)
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::NonTermination { .. })
}

/// The (k,r)-set hypergraph of the whole space, the hypergraph a (k,r) tree
/// is verified against.
pub fn krset_hypergraph(ctx: &FieldCtx, n: usize, k: usize, r: usize) -> Result<Hypergraph> {
    let space = Space::new(ctx.clone(), n)?;
    let full = PointSet::full(space);
    if n == 2 && k == 1 && r == 3 {
        return Hypergraph::collinear_triples(&full);
    }
    Hypergraph::krsets(&full, k, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::fano;

    #[test]
    fn single_node_tree() {
        let h = fano();
        let t = CCTree::root((0..7).collect());
        let rep = verify_cctree(&t, &h, TreeVerifyMode::Exhaustive).unwrap();
        assert!(rep.pass());
        let s = tree_stats(&t, 3);
        assert_eq!((s.nu, s.lambda), (1, 0));
        assert_eq!(s.aleph_log2, 7.0);
    }

    #[test]
    fn non_clique_label_is_caught() {
        let h = fano();
        let mut t = CCTree::root((0..7).collect());
        t.push_child(0, NodeCase::Deletion, vec![3, 4, 5, 6], vec![vec![0, 1, 3]]);
        let rep = verify_cctree(&t, &h, TreeVerifyMode::Exhaustive).unwrap();
        assert!(!rep.clique_pass);
        assert_eq!(rep.clique_witness, Some((1, vec![0, 1, 3])));
    }

    #[test]
    fn two_leaf_stats() {
        let mut t = CCTree::root((0..10).collect());
        t.push_child(
            0,
            NodeCase::Container,
            vec![0, 1, 2],
            vec![vec![3, 4, 5, 6, 7]],
        );
        t.push_child(
            0,
            NodeCase::Container,
            vec![0, 1],
            vec![vec![5, 6, 7, 8, 9]],
        );
        let s = tree_stats(&t, 3);
        assert_eq!((s.nu, s.kappa, s.lambda, s.chi), (2, 5, 1, 3));
        let want = 1.0 + 10f64.log2() + (3.0 + 3.0);
        assert!((s.aleph_log2 - want).abs() < 1e-12);
    }

    #[test]
    fn uncovered_set_is_caught() {
        let h = fano();
        let mut t = CCTree::root((0..7).collect());
        t.push_child(0, NodeCase::Container, vec![0, 1, 2, 3], vec![]);
        let rep = verify_cctree(&t, &h, TreeVerifyMode::Exhaustive).unwrap();
        assert!(rep.clique_pass && !rep.cover_pass);
    }

    #[test]
    fn text_round_trip() {
        let mut t = CCTree::root((0..7).collect());
        let a = t.push_child(0, NodeCase::Deletion, vec![3, 4, 5, 6], vec![vec![0, 1, 2]]);
        t.push_child(a, NodeCase::Container, vec![3, 4], vec![vec![5, 6]]);
        let text = t.to_text(3).unwrap();
        assert!(text.starts_with("0 - root {0 1 2 3 4 5 6}\n1 0 deletion {3 4 5 6} | {0 1 2}\n"));
        assert_eq!(CCTree::parse_text(&text).unwrap(), t);
    }

    #[test]
    fn supersat_preconditions() {
        let ctx = FieldCtx::new(11, 1).unwrap();
        let space = Space::new(ctx, 2).unwrap();
        let sp = SupersatParams::new(1, 3, 1.0, 0.01);
        let mut rng = RandomStream::new(0);
        let few = PointSet::from_indices(space.clone(), (0..5).collect());
        assert!(matches!(
            supersat_hypergraph(&few, &sp, &mut rng),
            Err(Error::TooSmall { .. })
        ));
        // a full line plus scattered points: the line is rich
        let mut pts: Vec<u32> = (0..11).collect();
        pts.extend((1..5).map(|x| x * 11 + (x * x) % 11));
        let rich = PointSet::from_indices(space, pts);
        assert!(matches!(
            supersat_hypergraph(&rich, &sp, &mut rng),
            Err(Error::RichFlatPresent { count: 11, .. })
        ));
    }
}
