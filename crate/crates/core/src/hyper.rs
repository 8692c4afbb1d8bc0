//! r-uniform hypergraphs with codegree queries and an exact maximum
//! independent set solver.
//!
//! Vertices are local indices `0..n`. Each vertex may carry an external
//! label (a point index when the hypergraph comes from geometry), kept in
//! `labels`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{self, PointSet};
use crate::poly::binomial;
use crate::rng::RandomStream;

/// Default vertex cap for [`max_independent_set_exact`].
pub const DEFAULT_MIS_CAP: usize = 80;
/// Hard limit of the bitset solver.
pub const MIS_HARD_CAP: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    r: usize,
    labels: Vec<u32>,
    /// Sorted edges, stride `r`, in lexicographic order without repeats.
    edges: Vec<u32>,
    incidence: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Hypergraph on `0..n`; duplicate edges are merged.
    pub fn new(r: usize, n: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        Self::with_labels(r, (0..n as u32).collect(), edges)
    }

    pub fn with_labels(r: usize, labels: Vec<u32>, edges: Vec<Vec<u32>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParams("uniformity must be at least 1".into()));
        }
        let n = labels.len();
        let mut flat = Vec::with_capacity(edges.len() * r);
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(edges.len());
        for mut e in edges {
            if e.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: e.len(),
                });
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParams(format!("edge {e:?} repeats a vertex")));
            }
            if let Some(&v) = e.iter().find(|&&v| v as usize >= n) {
                return Err(Error::UnknownVertex(v));
            }
            rows.push(e);
        }
        rows.sort_unstable();
        rows.dedup();
        for e in &rows {
            flat.extend_from_slice(e);
        }
        Ok(Self::from_sorted_flat(r, labels, flat))
    }

    fn from_sorted_flat(r: usize, labels: Vec<u32>, edges: Vec<u32>) -> Self {
        let mut incidence = vec![Vec::new(); labels.len()];
        for (i, e) in edges.chunks_exact(r).enumerate() {
            for &v in e {
                incidence[v as usize].push(i as u32);
            }
        }
        Hypergraph {
            r,
            labels,
            edges,
            incidence,
        }
    }

    /// Edges given by labels; `labels` must be sorted.
    pub fn from_labelled_edges(r: usize, labels: Vec<u32>, edges: Vec<Vec<u32>>) -> Result<Self> {
        let local = edges
            .into_iter()
            .map(|e| {
                e.into_iter()
                    .map(|l| {
                        labels
                            .binary_search(&l)
                            .map(|i| i as u32)
                            .map_err(|_| Error::UnknownVertex(l))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_labels(r, labels, local)
    }

    /// The 3-uniform hypergraph of collinear triples of a planar point set;
    /// vertex `i` is the `i`-th point of `P`.
    pub fn collinear_triples(p: &PointSet) -> Result<Self> {
        let labels = p.indices().to_vec();
        let buckets = geom::plane_line_buckets(p, 3)?;
        let mut rows: Vec<[u32; 3]> = Vec::new();
        for pts in buckets.values() {
            let local: Vec<u32> = pts
                .iter()
                .map(|l| labels.binary_search(l).expect("member") as u32)
                .collect();
            for a in 0..local.len() {
                for b in a + 1..local.len() {
                    for c in b + 1..local.len() {
                        let mut e = [local[a], local[b], local[c]];
                        e.sort_unstable();
                        rows.push(e);
                    }
                }
            }
        }
        // each collinear triple lies on exactly one line
        rows.sort_unstable();
        let flat = rows.into_iter().flatten().collect();
        Ok(Self::from_sorted_flat(3, labels, flat))
    }

    /// All (k,r)-sets of `P`: r-subsets contained in some k-flat.
    pub fn krsets(p: &PointSet, k: usize, r: usize) -> Result<Self> {
        let space = p.space();
        let flats = geom::enumerate_flats(space.field(), space.n(), k)?;
        let labels = p.indices().to_vec();
        let bits = p.bitmap();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for f in &flats {
            let inside: Vec<u32> = f
                .point_indices(space)
                .into_iter()
                .filter(|&i| bits[i as usize])
                .map(|i| labels.binary_search(&i).expect("member") as u32)
                .collect();
            for combo in geom::combinations(inside.len(), r) {
                rows.push(combo.iter().map(|&j| inside[j]).collect());
            }
        }
        Self::with_labels(r, labels, rows)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len() / self.r
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, v: u32) -> u32 {
        self.labels[v as usize]
    }

    /// Local index of a label, if present.
    pub fn vertex_of(&self, label: u32) -> Option<u32> {
        // labels built from point sets are sorted; fall back to a scan otherwise
        match self.labels.binary_search(&label) {
            Ok(i) => Some(i as u32),
            Err(_) => self
                .labels
                .iter()
                .position(|&l| l == label)
                .map(|i| i as u32),
        }
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i * self.r..(i + 1) * self.r]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[u32]> {
        self.edges.chunks_exact(self.r)
    }

    pub fn incidence(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }

    pub fn contains_edge(&self, e: &[u32]) -> bool {
        if e.len() != self.r {
            return false;
        }
        let mut key = e.to_vec();
        key.sort_unstable();
        let (mut lo, mut hi) = (0, self.num_edges());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid).cmp(&key[..]) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    fn check_vertices(&self, s: &[u32]) -> Result<()> {
        match s.iter().find(|&&v| v as usize >= self.num_vertices()) {
            Some(&v) => Err(Error::UnknownVertex(v)),
            None => Ok(()),
        }
    }

    fn mask(&self, s: &[u32]) -> Vec<bool> {
        let mut m = vec![false; self.num_vertices()];
        for &v in s {
            m[v as usize] = true;
        }
        m
    }

    /// Number of edges inside the vertex set `s` (given as a membership mask).
    pub fn edges_within_mask(&self, mask: &[bool]) -> usize {
        self.edges()
            .filter(|e| e.iter().all(|&v| mask[v as usize]))
            .count()
    }

    pub fn edges_within(&self, s: &[u32]) -> Result<usize> {
        self.check_vertices(s)?;
        let mask = self.mask(s);
        // count each inside edge at its least vertex
        let mut count = 0;
        for &v in s {
            for &ei in &self.incidence[v as usize] {
                let e = self.edge(ei as usize);
                if e[0] == v && e.iter().all(|&w| mask[w as usize]) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    pub fn is_independent(&self, s: &[u32]) -> Result<bool> {
        self.check_vertices(s)?;
        if s.len() < self.r {
            return Ok(true);
        }
        let mask = self.mask(s);
        Ok(!s.iter().any(|&v| {
            self.incidence[v as usize]
                .iter()
                .any(|&ei| self.edge(ei as usize).iter().all(|&w| mask[w as usize]))
        }))
    }

    pub fn is_clique(&self, s: &[u32]) -> Result<bool> {
        self.check_vertices(s)?;
        let mut set = s.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.len() < self.r {
            return Ok(true);
        }
        let inside = self.edges_within(&set)?;
        Ok(inside as u128 == binomial(set.len() as u64, self.r as u64))
    }

    /// Sub-hypergraph induced on `c`; new vertex `i` is `c[i]` after sorting,
    /// and keeps its label.
    pub fn induced(&self, c: &[u32]) -> Result<Hypergraph> {
        self.check_vertices(c)?;
        let mut verts = c.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let mut local = vec![u32::MAX; self.num_vertices()];
        for (i, &v) in verts.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let mut flat = Vec::new();
        for e in self.edges() {
            if e.iter().all(|&v| local[v as usize] != u32::MAX) {
                // order-preserving relabel keeps edges sorted
                flat.extend(e.iter().map(|&v| local[v as usize]));
            }
        }
        let labels = verts.iter().map(|&v| self.labels[v as usize]).collect();
        Ok(Self::from_sorted_flat(self.r, labels, flat))
    }

    /// `Δ_i`: the largest number of edges containing a common `i`-set.
    pub fn max_codegree(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.r {
            return Err(Error::InvalidParams(format!(
                "codegree order {i} outside 1..={}",
                self.r
            )));
        }
        if self.num_edges() == 0 {
            return Ok(0);
        }
        if i == 1 {
            return Ok(self.incidence.iter().map(Vec::len).max().unwrap_or(0));
        }
        if i == self.r {
            return Ok(1);
        }
        let subsets = geom::combinations(self.r, i);
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
        for e in self.edges() {
            for s in &subsets {
                let key: Vec<u32> = s.iter().map(|&j| e[j]).collect();
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        Ok(counts.values().copied().max().unwrap_or(0))
    }

    /// `[Δ_1, ..., Δ_r]`.
    pub fn codegrees(&self) -> Vec<usize> {
        (1..=self.r)
            .map(|i| self.max_codegree(i).expect("valid order"))
            .collect()
    }

    /// Text form: header `r |V| |E|`, then one edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.r, self.num_vertices(), self.num_edges());
        for e in self.edges() {
            let parts: Vec<String> = e.iter().map(u32::to_string).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty hypergraph file".into()))?;
        let nums = |l: &str| -> Result<Vec<u32>> {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("{t}: {e}")))
                })
                .collect()
        };
        let h = nums(header)?;
        let [r, n, m] = h.as_slice() else {
            return Err(Error::Parse(format!("bad hypergraph header `{header}`")));
        };
        let edges = lines.map(nums).collect::<Result<Vec<_>>>()?;
        if edges.len() != *m as usize {
            return Err(Error::Parse(format!(
                "header promises {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(*r as usize, *n as usize, edges)
    }

    /// A random maximal independent set: vertices in shuffled order, each
    /// added when it completes no edge.
    pub fn random_maximal_independent(&self, rng: &mut RandomStream) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.num_vertices() as u32).collect();
        rng.shuffle(&mut order);
        self.greedy_independent(&order)
    }

    /// Greedy maximal independent set scanning `order`.
    pub fn greedy_independent(&self, order: &[u32]) -> Vec<u32> {
        let n = self.num_vertices();
        let mut chosen = vec![false; n];
        let mut forbidden = vec![false; n];
        // chosen vertices per edge, touched edges only
        let mut fill: HashMap<u32, u32> = HashMap::new();
        if self.r == 1 {
            for e in self.edges() {
                forbidden[e[0] as usize] = true;
            }
        }
        let mut out = Vec::new();
        for &v in order {
            if forbidden[v as usize] || chosen[v as usize] {
                continue;
            }
            chosen[v as usize] = true;
            out.push(v);
            for &ei in &self.incidence[v as usize] {
                let c = fill.entry(ei).or_insert(0);
                *c += 1;
                if *c as usize == self.r - 1 {
                    if let Some(&w) = self
                        .edge(ei as usize)
                        .iter()
                        .find(|&&w| !chosen[w as usize])
                    {
                        forbidden[w as usize] = true;
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Options for the exact solver.
#[derive(Clone, Debug, Default)]
pub struct MisOptions {
    /// Vertex cap; `None` means [`DEFAULT_MIS_CAP`].
    pub cap: Option<usize>,
    /// Clique covers used for upper bounds; the smallest bound wins.
    pub clique_partitions: Vec<CliquePartition>,
    /// Vertices that must be in the solution (e.g. fixed by symmetry).
    pub forced: Vec<u32>,
}

/// Cliques whose members, apart from an optional common `anchor`, are
/// pairwise disjoint. An independent set meets each clique in fewer than
/// `r` vertices, so the partition bounds how many candidates can still be
/// added. Anchored partitions are only consulted once the anchor is chosen.
#[derive(Clone, Debug, Default)]
pub struct CliquePartition {
    pub anchor: Option<u32>,
    pub cliques: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisResult {
    pub size: usize,
    pub witness: Vec<u32>,
    pub nodes: u64,
}

/// Maximum independent set by branch and bound.
pub fn max_independent_set_exact(h: &Hypergraph) -> Result<MisResult> {
    max_independent_set_with(h, &MisOptions::default())
}

pub fn max_independent_set_with(h: &Hypergraph, opts: &MisOptions) -> Result<MisResult> {
    let n = h.num_vertices();
    let cap = opts.cap.unwrap_or(DEFAULT_MIS_CAP).min(MIS_HARD_CAP);
    if n > cap {
        return Err(Error::TooLarge {
            size: n as u128,
            cap: cap as u128,
        });
    }
    h.check_vertices(&opts.forced)?;
    // position in the branching order: descending degree, ties by index
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i;
    }
    let bit = |v: u32| 1u128 << pos[v as usize];
    let edge_masks: Vec<u128> = h
        .edges()
        .map(|e| e.iter().fold(0, |m, &v| m | bit(v)))
        .collect();
    let incident: Vec<Vec<u128>> = order
        .iter()
        .map(|&v| {
            h.incidence(v)
                .iter()
                .map(|&ei| edge_masks[ei as usize])
                .collect()
        })
        .collect();
    let mut partitions: Vec<Partition> = Vec::new();
    for part in &opts.clique_partitions {
        let mut masks = Vec::with_capacity(part.cliques.len());
        for clique in &part.cliques {
            h.check_vertices(clique)?;
            masks.push(clique.iter().fold(0u128, |m, &v| m | bit(v)));
        }
        let anchor = match part.anchor {
            Some(a) => {
                h.check_vertices(&[a])?;
                bit(a)
            }
            None => 0,
        };
        partitions.push(Partition {
            anchor,
            cliques: masks,
        });
    }
    let all = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    let mut solver = Solver {
        r: h.r() as u32,
        incident,
        partitions,
        best: 0,
        best_set: 0,
        nodes: 0,
    };
    let mut chosen = 0u128;
    let mut cand = all;
    if h.r() == 1 {
        for e in h.edges() {
            cand &= !bit(e[0]);
        }
    }
    for &v in &opts.forced {
        let b = bit(v);
        if chosen & b != 0 {
            continue;
        }
        if cand & b == 0 {
            return Err(Error::InvalidParams(
                "forced vertices are not independent".into(),
            ));
        }
        cand = solver.add(pos[v as usize], chosen, cand);
        chosen |= b;
    }
    // greedy start in branching order
    let (mut gc, mut gcand) = (chosen, cand);
    while gcand != 0 {
        let i = gcand.trailing_zeros() as usize;
        gcand = solver.add(i, gc, gcand);
        gc |= 1u128 << i;
    }
    solver.best = gc.count_ones();
    solver.best_set = gc;
    solver.search(chosen, cand);
    let mut witness: Vec<u32> = (0..n)
        .filter(|&i| solver.best_set >> i & 1 == 1)
        .map(|i| order[i])
        .collect();
    witness.sort_unstable();
    debug_assert!(h.is_independent(&witness).unwrap());
    Ok(MisResult {
        size: witness.len(),
        witness,
        nodes: solver.nodes,
    })
}

struct Partition {
    anchor: u128,
    cliques: Vec<u128>,
}

struct Solver {
    r: u32,
    /// Edge masks incident to each position.
    incident: Vec<Vec<u128>>,
    partitions: Vec<Partition>,
    best: u32,
    best_set: u128,
    nodes: u64,
}

impl Solver {
    /// Candidates left after adding position `i` to `chosen`.
    fn add(&self, i: usize, chosen: u128, cand: u128) -> u128 {
        let b = 1u128 << i;
        let now = chosen | b;
        let mut cand = cand & !b;
        for &e in &self.incident[i] {
            let rest = e & !now;
            if rest.count_ones() == 1 {
                cand &= !rest;
            }
        }
        cand
    }

    fn bound(&self, chosen: u128, cand: u128) -> u32 {
        let mut best = cand.count_ones();
        for part in &self.partitions {
            if part.anchor & !chosen != 0 {
                continue;
            }
            let mut covered = 0u128;
            let mut total = 0u32;
            for &k in &part.cliques {
                let room = (self.r - 1).saturating_sub((chosen & k).count_ones());
                total += room.min((cand & k & !part.anchor).count_ones());
                covered |= k;
            }
            total += (cand & !covered).count_ones();
            best = best.min(total);
        }
        best
    }

    fn search(&mut self, chosen: u128, cand: u128) {
        self.nodes += 1;
        let size = chosen.count_ones();
        if cand == 0 {
            if size > self.best {
                self.best = size;
                self.best_set = chosen;
            }
            return;
        }
        if size + self.bound(chosen, cand) <= self.best {
            return;
        }
        let i = cand.trailing_zeros() as usize;
        let b = 1u128 << i;
        let next = self.add(i, chosen, cand);
        self.search(chosen | b, next);
        self.search(chosen, cand & !b);
    }
}

/// Every independent set of a hypergraph with at most 24 vertices, as bit
/// masks, found by depth-first extension.
pub fn all_independent_sets(h: &Hypergraph) -> Result<Vec<u32>> {
    let n = h.num_vertices();
    if n > 24 {
        return Err(Error::TooLarge {
            size: n as u128,
            cap: 24,
        });
    }
    let edge_masks: Vec<u32> = h
        .edges()
        .map(|e| e.iter().fold(0, |m, &v| m | 1 << v))
        .collect();
    let incident: Vec<Vec<u32>> = (0..n as u32)
        .map(|v| {
            h.incidence(v)
                .iter()
                .map(|&ei| edge_masks[ei as usize])
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    fn rec(start: usize, set: u32, n: usize, incident: &[Vec<u32>], out: &mut Vec<u32>) {
        out.push(set);
        for v in start..n {
            let next = set | 1 << v;
            if incident[v].iter().all(|&e| e & next != e) {
                rec(v + 1, next, n, incident, out);
            }
        }
    }
    rec(0, 0, n, &incident, &mut out);
    Ok(out)
}

/// Vertex list of a bit mask.
pub fn mask_to_vec(mask: u32) -> Vec<u32> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// The Fano plane as a 3-uniform hypergraph on `0..7`.
pub fn fano() -> Hypergraph {
    let lines = [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    Hypergraph::new(3, 7, lines.iter().map(|l| l.to_vec()).collect()).expect("fano")
}

/// All `C(n, r)` r-subsets of `0..n` as edges.
pub fn complete(r: usize, n: usize) -> Hypergraph {
    let edges = geom::combinations(n, r)
        .into_iter()
        .map(|c| c.into_iter().map(|v| v as u32).collect())
        .collect();
    Hypergraph::new(r, n, edges).expect("complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::geom::Space;

    fn brute_alpha(h: &Hypergraph) -> usize {
        let n = h.num_vertices();
        (0u32..1 << n)
            .filter(|&m| h.is_independent(&mask_to_vec(m)).unwrap())
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn codegree_examples() {
        assert_eq!(complete(3, 4).codegrees(), vec![3, 2, 1]);
        assert_eq!(&fano().codegrees()[..2], &[3, 1]);
        let empty = Hypergraph::new(3, 5, vec![]).unwrap();
        assert_eq!(empty.codegrees(), vec![0, 0, 0]);
    }

    #[test]
    fn duplicate_edges_merge() {
        let h = Hypergraph::new(3, 4, vec![vec![2, 1, 0], vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(h.num_edges(), 2);
        assert!(h.contains_edge(&[2, 0, 1]));
        assert!(!h.contains_edge(&[0, 1, 3]));
        assert!(matches!(
            Hypergraph::new(3, 3, vec![vec![0, 1, 5]]),
            Err(Error::UnknownVertex(5))
        ));
    }

    #[test]
    fn independence_and_cliques() {
        let f = fano();
        assert!(f.is_clique(&[0, 1]).unwrap());
        assert!(f.is_independent(&[0, 1]).unwrap());
        assert!(!f.is_independent(&[0, 1, 2, 3]).unwrap());
        assert!(f.is_clique(&[0, 1, 2]).unwrap());
        assert!(!f.is_clique(&[0, 1, 3]).unwrap());
        assert!(matches!(f.is_clique(&[9]), Err(Error::UnknownVertex(9))));

        let space = Space::new(FieldCtx::new(5, 1).unwrap(), 2).unwrap();
        let full = PointSet::full(space.clone());
        let h = Hypergraph::collinear_triples(&full).unwrap();
        assert_eq!(h.num_edges(), 30 * 10);
        let line: Vec<u32> = (0..5).map(|y| y).collect(); // x = 0
        assert!(h.is_clique(&line).unwrap());
    }

    #[test]
    fn induced_examples() {
        let f = fano();
        assert_eq!(f.induced(&(0..7).collect::<Vec<_>>()).unwrap(), f);
        let e = f.induced(&[]).unwrap();
        assert_eq!((e.num_vertices(), e.num_edges()), (0, 0));
        let sub = f.induced(&[0, 1, 2, 3, 5]).unwrap();
        let want = f
            .edges()
            .filter(|e| e.iter().all(|v| [0, 1, 2, 3, 5].contains(v)))
            .count();
        assert_eq!(sub.num_edges(), want);
        assert_eq!(sub.labels(), &[0, 1, 2, 3, 5]);
    }

    #[test]
    fn mis_examples() {
        let edgeless = Hypergraph::new(3, 6, vec![]).unwrap();
        assert_eq!(max_independent_set_exact(&edgeless).unwrap().size, 6);
        assert_eq!(max_independent_set_exact(&complete(3, 5)).unwrap().size, 2);
        let f = fano();
        let res = max_independent_set_exact(&f).unwrap();
        assert_eq!(res.size, 4);
        assert_eq!(brute_alpha(&f), 4);
        assert!(f.is_independent(&res.witness).unwrap());
    }

    #[test]
    fn mis_respects_cap() {
        let h = Hypergraph::new(3, 90, vec![]).unwrap();
        assert!(matches!(
            max_independent_set_exact(&h),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn mis_on_small_planes() {
        // no-three-in-line maximum in AG(2, q) for small q
        for (q, want) in [(3u64, 4usize), (4, 6), (5, 6)] {
            let space = Space::new(FieldCtx::from_order(q).unwrap(), 2).unwrap();
            let h = Hypergraph::collinear_triples(&PointSet::full(space)).unwrap();
            assert_eq!(max_independent_set_exact(&h).unwrap().size, want, "q = {q}");
        }
    }

    #[test]
    fn independent_set_enumeration() {
        let f = fano();
        let sets = all_independent_sets(&f).unwrap();
        let brute = (0u32..128)
            .filter(|&m| f.is_independent(&mask_to_vec(m)).unwrap())
            .count();
        assert_eq!(sets.len(), brute);
    }

    #[test]
    fn greedy_sets_are_maximal() {
        let f = fano();
        let mut rng = RandomStream::new(3);
        for _ in 0..50 {
            let s = f.random_maximal_independent(&mut rng);
            assert!(f.is_independent(&s).unwrap());
            for v in 0..7u32 {
                if !s.contains(&v) {
                    let mut t = s.clone();
                    t.push(v);
                    assert!(!f.is_independent(&t).unwrap());
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let f = fano();
        assert_eq!(Hypergraph::parse_text(&f.to_text()).unwrap(), f);
    }
}
