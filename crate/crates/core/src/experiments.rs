//! Experiment drivers behind the command-line tool and the examples.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cctree::{
    self, build_collinear_cctree, build_krset_cctree, supersat_hypergraph, trace_collinear, CCTree,
    CollinearParams, DeltaCertificate, KrParams, NodeLog, SupersatParams, TreeReport, TreeStats,
    TreeVerifyMode,
};
use crate::error::{Error, Result};
use crate::evasive::{self, construct_evasive, EvasiveParams};
use crate::field::FieldCtx;
use crate::geom::{self, PointSet, Space};
use crate::hyper::{
    max_independent_set_with, CliquePartition, Hypergraph, MisOptions, MIS_HARD_CAP,
};
use crate::poly::binomial;
use crate::rng::RandomStream;

pub const BAND_CAVEAT: &str =
    "bands use the nominal exponents -3/2 and -1/2; the q^(+-o(1)) factors of the boundaries are not instantiated";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaConfig {
    pub q: u32,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest expected `|S_p|` handed to the exact solver.
    pub mis_cap: usize,
}

impl AlphaConfig {
    pub fn new(q: u32, p: f64, trials: usize, seed: u64) -> Self {
        AlphaConfig {
            q,
            p,
            trials,
            seed,
            mis_cap: MIS_HARD_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaTrial {
    pub trial: usize,
    pub s_size: usize,
    pub alpha: usize,
    /// `false` when `alpha` is only a heuristic lower bound.
    pub exact: bool,
    pub moment: usize,
    pub cap: usize,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub q: u32,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub mode: String,
    pub lower_bound_only: bool,
    pub rows: Vec<AlphaTrial>,
    pub mean: f64,
    pub min: usize,
    pub max: usize,
    pub band: String,
    pub band_caveat: String,
    /// `p q^2 - p^3 T` with `T` the triple count of the plane, floored at 0.
    pub deletion_lower_bound: f64,
    pub sandwich_pass: bool,
}

/// Band of `p` by the nominal exponents.
pub fn alpha_band(q: u32, p: f64) -> &'static str {
    let q = q as f64;
    if p <= q.powf(-1.5) {
        "Theta(pq^2)"
    } else if p <= q.powf(-0.5) {
        "q^(1/2+o(1))"
    } else {
        "(1+-o(1))pq"
    }
}

/// Clique partitions of a planar point set by its lines: one unanchored
/// partition per parallel class, and the pencil through every point
/// anchored at that point. Vertices are local to `h`.
pub fn line_partitions(s: &PointSet, h: &Hypergraph) -> Result<Vec<CliquePartition>> {
    let q = s.space().q();
    let buckets = geom::plane_line_buckets(s, 1)?;
    let local = |l: &[u32]| -> Vec<u32> {
        l.iter()
            .map(|&x| h.vertex_of(x).expect("point of S"))
            .collect()
    };
    let qq = q * q;
    let mut classes: BTreeMap<u32, Vec<Vec<u32>>> = BTreeMap::new();
    let mut through: Vec<Vec<Vec<u32>>> = vec![Vec::new(); s.len()];
    for (&id, pts) in &buckets {
        let dir = if id >= qq { q } else { id / q };
        let line = local(pts);
        for &v in &line {
            through[v as usize].push(line.clone());
        }
        classes.entry(dir).or_default().push(line);
    }
    let mut parts: Vec<CliquePartition> = classes
        .into_values()
        .map(|cliques| CliquePartition {
            anchor: None,
            cliques,
        })
        .collect();
    parts.extend(
        through
            .into_iter()
            .enumerate()
            .map(|(v, cliques)| CliquePartition {
                anchor: Some(v as u32),
                cliques,
            }),
    );
    Ok(parts)
}

/// Exact α of the collinear-triple hypergraph on `s`. When `s` is the whole
/// plane, three points are fixed to `(0,0), (1,0), (0,1)`: the affine group
/// maps any three non-collinear points there.
pub fn alpha_exact(s: &PointSet) -> Result<(usize, Vec<u32>, u64)> {
    let h = Hypergraph::collinear_triples(s)?;
    let mut opts = MisOptions {
        cap: Some(MIS_HARD_CAP),
        clique_partitions: line_partitions(s, &h)?,
        forced: Vec::new(),
    };
    let q = s.space().q();
    if s.len() == s.space().size() as usize && q >= 2 {
        opts.forced = vec![0, 1, q];
    }
    let res = max_independent_set_with(&h, &opts)?;
    Ok((
        res.size,
        res.witness.iter().map(|&v| h.label(v)).collect(),
        res.nodes,
    ))
}

/// Greedy by fewest eliminated candidates, then (1,2)-exchanges until no
/// move improves. Returns local vertices.
pub fn alpha_heuristic(h: &Hypergraph) -> Vec<u32> {
    let n = h.num_vertices();
    let blocked_by = |set: &[u32], v: u32| -> bool {
        let mut with = set.to_vec();
        with.push(v);
        with.sort_unstable();
        !h.is_independent(&with).unwrap_or(false)
    };
    let mut set: Vec<u32> = Vec::new();
    loop {
        let cands: Vec<u32> = (0..n as u32)
            .filter(|&v| !set.contains(&v) && !blocked_by(&set, v))
            .collect();
        if cands.is_empty() {
            break;
        }
        let best = cands
            .iter()
            .map(|&v| {
                let mut with = set.clone();
                with.push(v);
                let lost = cands
                    .iter()
                    .filter(|&&w| w != v && blocked_by(&with, w))
                    .count();
                (lost, v)
            })
            .min()
            .expect("non-empty");
        set.push(best.1);
    }
    'improve: loop {
        set.sort_unstable();
        for i in 0..set.len() {
            let rest: Vec<u32> = set
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .collect();
            let free: Vec<u32> = (0..n as u32)
                .filter(|&v| !set.contains(&v) && !blocked_by(&rest, v))
                .collect();
            for (a, &x) in free.iter().enumerate() {
                let mut with = rest.clone();
                with.push(x);
                for &y in &free[a + 1..] {
                    if !blocked_by(&with, y) {
                        with.push(y);
                        set = with;
                        continue 'improve;
                    }
                }
            }
        }
        break;
    }
    set.sort_unstable();
    set
}

/// α of the collinear-triple hypergraph on p-random subsets of `F_q^2`.
pub fn run_alpha(cfg: &AlphaConfig) -> Result<AlphaReport> {
    if !(0.0..=1.0).contains(&cfg.p) {
        return Err(Error::InvalidParams(format!(
            "p = {} outside [0, 1]",
            cfg.p
        )));
    }
    let ctx = FieldCtx::from_order(cfg.q as u64)?;
    let space = Space::new(ctx.clone(), 2)?;
    let moment = geom::moment_curve(&ctx, 2)?;
    let expected = cfg.p * space.size() as f64;
    let exact_mode = expected <= cfg.mis_cap.min(MIS_HARD_CAP) as f64;
    let rows: Vec<AlphaTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<AlphaTrial> {
            let mut rng = RandomStream::derive(cfg.seed, t as u64);
            let idx: Vec<u32> = (0..space.size()).filter(|_| rng.unit() < cfg.p).collect();
            let s = PointSet::from_sorted(space.clone(), idx);
            let on_curve = s.indices().iter().filter(|&&i| moment.contains(i)).count();
            let cap = s.len().min(2 * cfg.q as usize);
            if exact_mode && s.len() <= MIS_HARD_CAP {
                let (alpha, _, nodes) = alpha_exact(&s)?;
                Ok(AlphaTrial {
                    trial: t,
                    s_size: s.len(),
                    alpha,
                    exact: true,
                    moment: on_curve,
                    cap,
                    nodes,
                })
            } else {
                let h = Hypergraph::collinear_triples(&s)?;
                let set = alpha_heuristic(&h);
                Ok(AlphaTrial {
                    trial: t,
                    s_size: s.len(),
                    alpha: set.len(),
                    exact: false,
                    moment: on_curve,
                    cap,
                    nodes: 0,
                })
            }
        })
        .collect::<Result<_>>()?;
    let all_exact = rows.iter().all(|r| r.exact);
    let any_exact = rows.iter().any(|r| r.exact);
    let mode = match (all_exact, any_exact) {
        (true, _) => "exact",
        (false, true) => "mixed",
        (false, false) => "heuristic",
    };
    let sum: usize = rows.iter().map(|r| r.alpha).sum();
    let mean = if rows.is_empty() {
        0.0
    } else {
        sum as f64 / rows.len() as f64
    };
    let sandwich_pass = rows.iter().all(|r| r.moment <= r.alpha && r.alpha <= r.cap);
    let q = cfg.q as f64;
    let triples = (q * q + q) * binomial(cfg.q as u64, 3) as f64;
    Ok(AlphaReport {
        q: cfg.q,
        p: cfg.p,
        trials: cfg.trials,
        seed: cfg.seed,
        mode: mode.to_string(),
        lower_bound_only: !all_exact,
        min: rows.iter().map(|r| r.alpha).min().unwrap_or(0),
        max: rows.iter().map(|r| r.alpha).max().unwrap_or(0),
        rows,
        mean,
        band: alpha_band(cfg.q, cfg.p).to_string(),
        band_caveat: BAND_CAVEAT.to_string(),
        deletion_lower_bound: (cfg.p * q * q - cfg.p.powi(3) * triples).max(0.0),
        sandwich_pass,
    })
}

/// Hyperplanes of `F_q^n` as sorted point lists.
fn hyperplanes(space: &Space) -> Result<Vec<Vec<u32>>> {
    let flats = geom::enumerate_flats(space.field(), space.n(), space.n() - 1)?;
    Ok(flats.iter().map(|f| f.point_indices(space)).collect())
}

/// Number of general-position subsets of `F_q^n` (no hyperplane holds
/// `n + 1` of the points), by depth-first enumeration of all subsets.
pub fn count_general_position(ctx: &FieldCtx, n: usize) -> Result<u128> {
    let space = Space::new(ctx.clone(), n)?;
    if n < 1 {
        return Err(Error::InvalidParams("n must be positive".into()));
    }
    if space.size() > 25 {
        return Err(Error::TooLarge {
            size: space.size() as u128,
            cap: 25,
        });
    }
    let planes = hyperplanes(&space)?;
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); space.size() as usize];
    for (i, h) in planes.iter().enumerate() {
        for &p in h {
            through[p as usize].push(i);
        }
    }
    fn walk(v: usize, through: &[Vec<usize>], load: &mut [usize], limit: usize) -> u128 {
        if v == through.len() {
            return 1;
        }
        let mut total = walk(v + 1, through, load, limit);
        if through[v].iter().all(|&h| load[h] < limit) {
            for &h in &through[v] {
                load[h] += 1;
            }
            total += walk(v + 1, through, load, limit);
            for &h in &through[v] {
                load[h] -= 1;
            }
        }
        total
    }
    let mut load = vec![0usize; planes.len()];
    Ok(walk(0, &through, &mut load, n))
}

/// Inclusion-exclusion over the violating `(n+1)`-sets: subsets avoiding
/// all of them are exactly the general-position sets.
pub fn count_general_position_oracle(ctx: &FieldCtx, n: usize) -> Result<u128> {
    let space = Space::new(ctx.clone(), n)?;
    let size = space.size() as usize;
    if size > 25 {
        return Err(Error::TooLarge {
            size: size as u128,
            cap: 25,
        });
    }
    let mut bad: Vec<u32> = Vec::new();
    for h in hyperplanes(&space)? {
        for c in geom::combinations(h.len(), n + 1) {
            bad.push(c.iter().fold(0u32, |m, &i| m | 1 << h[i]));
        }
    }
    bad.sort_unstable();
    bad.dedup();
    if bad.len() > 30 {
        return Err(Error::TooLarge {
            size: bad.len() as u128,
            cap: 30,
        });
    }
    // sum over families F of (-1)^|F| 2^(size - |union F|)
    fn ie(bad: &[u32], i: usize, union: u32, sign: i128, size: usize) -> i128 {
        if i == bad.len() {
            return sign * (1i128 << (size - union.count_ones() as usize));
        }
        ie(bad, i + 1, union, sign, size) + ie(bad, i + 1, union | bad[i], -sign, size)
    }
    let v = ie(&bad, 0, 0, 1, size);
    Ok(v as u128)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupersatConfig {
    pub qs: Vec<u32>,
    pub densities: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub theta: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleRow {
    pub q: u32,
    pub density: f64,
    pub sample: usize,
    pub m: usize,
    pub count: u64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateRow {
    pub q: u32,
    pub sample: usize,
    pub attempts: usize,
    pub edges_valid: bool,
    pub certificate: DeltaCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupersatReport {
    pub config: SupersatConfig,
    pub rows: Vec<TripleRow>,
    pub certificates: Vec<CertificateRow>,
    pub all_above_bound: bool,
    pub all_edges_valid: bool,
}

/// Every edge has r points spanning at most a k-flat.
pub fn edges_are_krsets(h: &Hypergraph, space: &Space, k: usize) -> bool {
    h.edges().all(|e| {
        let labels: Vec<u32> = e.iter().map(|&v| h.label(v)).collect();
        let mut distinct = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        distinct.len() == h.r() && geom::span_dim(space, &labels) <= k
    })
}

/// Random point set of `F_q^2` meeting both preconditions of the randomized
/// supersaturation step, drawn by rejection.
pub fn sample_supersat_input(
    space: &Space,
    m: usize,
    params: &SupersatParams,
    rng: &mut RandomStream,
    max_attempts: usize,
) -> Result<(PointSet, usize)> {
    let limit = 2.0 * m as f64 / (space.q() as f64).sqrt();
    for attempt in 1..=max_attempts {
        let mut all: Vec<u32> = (0..space.size()).collect();
        rng.shuffle(&mut all);
        all.truncate(m);
        let p = PointSet::from_indices(space.clone(), all);
        if geom::incidence_profile(&p, params.k)?.max_count as f64 <= limit {
            return Ok((p, attempt));
        }
    }
    Err(Error::InvalidParams(format!(
        "no {m}-point set without rich {}-flats in {max_attempts} draws",
        params.k
    )))
}

/// Triple counts against the supersaturation bound, and certificates of the
/// randomized (1,3)-set hypergraph.
pub fn run_supersat_sweep(cfg: &SupersatConfig) -> Result<SupersatReport> {
    let mut rows = Vec::new();
    let mut certificates = Vec::new();
    for &q in &cfg.qs {
        if q > 13 {
            return Err(Error::InvalidParams(format!(
                "triple sweep needs q ≤ 13, got {q}"
            )));
        }
        let ctx = FieldCtx::from_order(q as u64)?;
        let space = Space::new(ctx, 2)?;
        let jobs: Vec<(usize, f64, usize)> = cfg
            .densities
            .iter()
            .enumerate()
            .flat_map(|(di, &d)| (0..cfg.samples).map(move |s| (di, d, s)))
            .collect();
        let mut part: Vec<TripleRow> = jobs
            .par_iter()
            .map(|&(di, d, s)| -> Result<TripleRow> {
                let id = ((q as u64) << 40) | ((di as u64) << 20) | s as u64;
                let mut rng = RandomStream::derive(cfg.seed, id);
                let idx: Vec<u32> = (0..space.size()).filter(|_| rng.unit() < d).collect();
                let p = PointSet::from_sorted(space.clone(), idx);
                let count = geom::count_collinear_triples(&p)?;
                let bound = geom::supersat_lower_bound(p.len() as u64, q as u64);
                Ok(TripleRow {
                    q,
                    density: d,
                    sample: s,
                    m: p.len(),
                    count,
                    bound,
                    ratio: if bound > 0.0 {
                        count as f64 / bound
                    } else {
                        0.0
                    },
                    pass: count as f64 >= bound,
                })
            })
            .collect::<Result<_>>()?;
        rows.append(&mut part);

        let sp = SupersatParams::new(1, 3, cfg.theta, cfg.c);
        let m = (space.size() as usize / 2).max((cfg.theta * q as f64).ceil() as usize);
        let mut certs: Vec<CertificateRow> = (0..cfg.samples)
            .into_par_iter()
            .map(|s| -> Result<CertificateRow> {
                let mut rng =
                    RandomStream::derive(cfg.seed ^ 0x5eed, ((q as u64) << 32) | s as u64);
                let (p, attempts) = sample_supersat_input(&space, m, &sp, &mut rng, 1000)?;
                let (h, certificate) = supersat_hypergraph(&p, &sp, &mut rng)?;
                Ok(CertificateRow {
                    q,
                    sample: s,
                    attempts,
                    edges_valid: edges_are_krsets(&h, &space, 1),
                    certificate,
                })
            })
            .collect::<Result<_>>()?;
        certificates.append(&mut certs);
    }
    Ok(SupersatReport {
        config: cfg.clone(),
        all_above_bound: rows.iter().all(|r| r.pass),
        all_edges_valid: certificates.iter().all(|c| c.edges_valid),
        rows,
        certificates,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    pub q: u32,
    pub trials: usize,
    pub seed: u64,
    /// Samples per trial before it counts as a failure.
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub trial: usize,
    pub success: bool,
    pub size: usize,
    pub size_ratio: f64,
    pub verify_r: usize,
    pub max_intersection: usize,
    pub slice_bound: u128,
    pub slice_ratio: f64,
    pub within_slice_bound: bool,
    pub evasive_at_schedule: bool,
    pub chart: usize,
    pub samples_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub degrees: Vec<u64>,
    pub chow_dimension: u128,
    pub r_value: u128,
    pub rows: Vec<CampaignRow>,
    pub success_rate: f64,
    pub mean_size_ratio: f64,
    pub all_within_slice_bound: bool,
}

/// Runs the random-algebraic construction over independent seeds.
pub fn run_evasive_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let params = EvasiveParams {
        n: cfg.n,
        k: cfg.k,
        d: cfg.d,
        r: 1,
        q: cfg.q,
    };
    params.validate()?;
    let schedule = evasive::degree_schedule(cfg.n, cfg.k, cfg.d)?;
    if cfg.q as u128 <= schedule.r_value {
        return Err(Error::InvalidParams(format!(
            "q = {} must exceed r = {}",
            cfg.q, schedule.r_value
        )));
    }
    let slices = (cfg.q as f64).powi((cfg.n - cfg.k) as i32);
    let rows: Vec<CampaignRow> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<CampaignRow> {
            let mut rng = RandomStream::derive(cfg.seed, t as u64);
            match construct_evasive(&params, &mut rng, cfg.attempts.max(1)) {
                Ok(c) => Ok(row(t, true, &c, &params, slices)),
                Err(Error::ExhaustedAttempts { best, .. }) => {
                    Ok(row(t, false, &best, &params, slices))
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let wins: Vec<&CampaignRow> = rows.iter().filter(|r| r.success).collect();
    Ok(CampaignReport {
        config: *cfg,
        degrees: schedule.degrees.clone(),
        chow_dimension: schedule.chow_dimension,
        r_value: schedule.r_value,
        success_rate: if rows.is_empty() {
            0.0
        } else {
            wins.len() as f64 / rows.len() as f64
        },
        mean_size_ratio: if wins.is_empty() {
            0.0
        } else {
            wins.iter().map(|r| r.size_ratio).sum::<f64>() / wins.len() as f64
        },
        all_within_slice_bound: wins.iter().all(|r| r.within_slice_bound),
        rows,
    })
}

fn row(
    t: usize,
    success: bool,
    c: &evasive::Construction,
    params: &EvasiveParams,
    slices: f64,
) -> CampaignRow {
    let size = c.candidate.len();
    let bound = evasive::slice_bound(&params.with_r(c.verify_r));
    CampaignRow {
        trial: t,
        success,
        size,
        size_ratio: size as f64 / slices,
        verify_r: c.verify_r,
        max_intersection: c.verdict.max_intersection,
        slice_bound: bound,
        slice_ratio: if bound > 0 {
            size as f64 / bound as f64
        } else {
            0.0
        },
        within_slice_bound: size as u128 <= bound,
        evasive_at_schedule: c.verdict_at_schedule.evasive,
        chart: c.chart,
        samples_used: c.trials_used,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Collinear,
    Krset,
}

impl std::str::FromStr for Process {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collinear" => Ok(Process::Collinear),
            "krset" => Ok(Process::Krset),
            _ => Err(Error::InvalidParams(format!("unknown process `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub process: Process,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub eps: f64,
    pub c: f64,
    pub c_prime: f64,
    pub theta: f64,
    pub seed: u64,
    /// Sampled maximal independent sets for the cover check.
    pub samples: usize,
    pub max_nodes: usize,
    /// Paths traced when the collinear tree cannot be built.
    pub trace_samples: usize,
}

impl TreeConfig {
    pub fn collinear(q: u32, seed: u64) -> Self {
        TreeConfig {
            process: Process::Collinear,
            q,
            n: 2,
            k: 1,
            r: 3,
            eps: 0.5,
            c: 0.01,
            c_prime: 2.0,
            theta: 1.0,
            seed,
            samples: 10_000,
            max_nodes: cctree::DEFAULT_MAX_NODES,
            trace_samples: 0,
        }
    }

    pub fn krset(q: u32, n: usize, k: usize, r: usize, theta: f64, seed: u64) -> Self {
        TreeConfig {
            process: Process::Krset,
            n,
            k,
            r,
            theta,
            ..TreeConfig::collinear(q, seed)
        }
    }

    /// Leaves must have `|C_0|` below this.
    pub fn leaf_threshold(&self) -> f64 {
        match self.process {
            Process::Collinear => (1.0 + self.eps) * self.q as f64,
            Process::Krset => 2.0 * self.theta * (self.q as f64).powi((self.n - self.k) as i32),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSummary {
    pub samples: usize,
    pub all_contained: bool,
    pub all_leaves_small: bool,
    pub max_leaf_c0: usize,
    pub max_depth: usize,
    pub max_lambda: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeRunReport {
    pub config: TreeConfig,
    pub built: bool,
    pub error: Option<String>,
    pub stats: Option<TreeStats>,
    pub verification: Option<TreeReport>,
    pub leaves_small: bool,
    pub cliques_in_flats: bool,
    pub progress_ok: bool,
    /// `λ / (√q ln q)`.
    pub lambda_fit: Option<f64>,
    /// `height / ln q`.
    pub height_fit: Option<f64>,
    pub trace: Option<TraceSummary>,
    pub log: Vec<NodeLog>,
}

impl TreeRunReport {
    pub fn pass(&self) -> bool {
        self.built
            && self.leaves_small
            && self.cliques_in_flats
            && self.progress_ok
            && self.verification.as_ref().is_some_and(TreeReport::pass)
    }
}

/// Builds a container-clique tree and checks it. A build that hits the node
/// cap is reported, not raised; for the collinear process sampled
/// independent sets are then traced through the unbuilt tree instead.
pub fn run_cctree(cfg: &TreeConfig) -> Result<(TreeRunReport, Option<CCTree>)> {
    let ctx = FieldCtx::from_order(cfg.q as u64)?;
    let h = match cfg.process {
        Process::Collinear => cctree::krset_hypergraph(&ctx, 2, 1, 3)?,
        Process::Krset => cctree::krset_hypergraph(&ctx, cfg.n, cfg.k, cfg.r)?,
    };
    let built = match cfg.process {
        Process::Collinear => {
            let mut p = CollinearParams::new(cfg.eps, cfg.c_prime, cfg.c);
            p.max_nodes = cfg.max_nodes;
            build_collinear_cctree(&ctx, &p)
        }
        Process::Krset => {
            let mut p = KrParams::new(cfg.n, cfg.k, cfg.r, cfg.theta, cfg.c, cfg.seed);
            p.max_nodes = cfg.max_nodes;
            build_krset_cctree(&ctx, &p)
        }
    };
    let mut report = TreeRunReport {
        config: *cfg,
        built: false,
        error: None,
        stats: None,
        verification: None,
        leaves_small: false,
        cliques_in_flats: false,
        progress_ok: false,
        lambda_fit: None,
        height_fit: None,
        trace: None,
        log: Vec::new(),
    };
    let out = match built {
        Ok(out) => out,
        Err(e @ Error::NonTermination { .. }) => {
            report.error = Some(e.to_string());
            if cfg.process == Process::Collinear && cfg.trace_samples > 0 {
                report.trace = Some(trace_summary(&ctx, cfg, &h)?);
            }
            return Ok((report, None));
        }
        Err(e) => return Err(e),
    };
    let tree = out.tree;
    let space = Space::new(ctx.clone(), cfg.n)?;
    let threshold = cfg.leaf_threshold();
    report.built = true;
    report.leaves_small = tree
        .leaves()
        .all(|x| (tree.nodes[x].c0.len() as f64) < threshold);
    report.cliques_in_flats = tree
        .nodes
        .iter()
        .flat_map(|n| &n.appended)
        .all(|k| !k.is_empty() && geom::span_dim(&space, k) <= cfg.k);
    let edges: Vec<usize> = tree
        .nodes
        .par_iter()
        .map(|n| h.edges_within(&local_of(&h, &n.c0)))
        .collect::<Result<_>>()?;
    report.progress_ok = tree.nodes.iter().enumerate().skip(1).all(|(x, n)| {
        let p = n.parent.expect("non-root");
        let (a, b) = (tree.nodes[p].c0.len(), n.c0.len());
        2 * b <= a || (b as f64) < threshold || edges[x] < edges[p]
    });
    let mode = if h.num_vertices() <= 24 {
        TreeVerifyMode::Exhaustive
    } else {
        TreeVerifyMode::Sampled {
            samples: cfg.samples,
            seed: cfg.seed,
        }
    };
    report.verification = Some(cctree::verify_cctree(&tree, &h, mode)?);
    let lq = (cfg.q as f64).ln();
    report.lambda_fit = Some(out.stats.lambda as f64 / ((cfg.q as f64).sqrt() * lq));
    report.height_fit = Some(out.stats.height as f64 / lq);
    report.stats = Some(out.stats);
    report.log = out.log;
    Ok((report, Some(tree)))
}

fn local_of(h: &Hypergraph, labels: &[u32]) -> Vec<u32> {
    labels.iter().filter_map(|&l| h.vertex_of(l)).collect()
}

fn trace_summary(ctx: &FieldCtx, cfg: &TreeConfig, h: &Hypergraph) -> Result<TraceSummary> {
    let mut p = CollinearParams::new(cfg.eps, cfg.c_prime, cfg.c);
    p.max_nodes = cfg.max_nodes;
    let threshold = cfg.leaf_threshold();
    let paths: Vec<cctree::TracedPath> = (0..cfg.trace_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomStream::derive(cfg.seed, i as u64);
            let set: Vec<u32> = h
                .random_maximal_independent(&mut rng)
                .iter()
                .map(|&v| h.label(v))
                .collect();
            trace_collinear(ctx, &p, h, &set)
        })
        .collect::<Result<_>>()?;
    Ok(TraceSummary {
        samples: paths.len(),
        all_contained: paths.iter().all(|t| t.contained),
        all_leaves_small: paths.iter().all(|t| (t.leaf_c0.len() as f64) < threshold),
        max_leaf_c0: paths.iter().map(|t| t.leaf_c0.len()).max().unwrap_or(0),
        max_depth: paths.iter().map(|t| t.sizes.len() - 1).max().unwrap_or(0),
        max_lambda: paths.iter().map(|t| t.cliques.len()).max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_position_small() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(count_general_position(&f2, 2).unwrap(), 16);
        assert_eq!(count_general_position_oracle(&f2, 2).unwrap(), 16);
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(
            count_general_position(&f3, 2).unwrap(),
            count_general_position_oracle(&f3, 2).unwrap()
        );
    }

    #[test]
    fn alpha_zero_and_full() {
        let r = run_alpha(&AlphaConfig::new(5, 0.0, 3, 1)).unwrap();
        assert!(r.rows.iter().all(|t| t.alpha == 0 && t.exact));
        let r = run_alpha(&AlphaConfig::new(5, 1.0, 2, 1)).unwrap();
        assert_eq!((r.min, r.max), (6, 6));
        assert!(r.sandwich_pass);
    }

    #[test]
    fn heuristic_is_independent() {
        let ctx = FieldCtx::new(5, 1).unwrap();
        let s = PointSet::full(Space::new(ctx, 2).unwrap());
        let h = Hypergraph::collinear_triples(&s).unwrap();
        let set = alpha_heuristic(&h);
        assert!(h.is_independent(&set).unwrap());
        assert!(set.len() >= 4 && set.len() <= 6);
    }
}
