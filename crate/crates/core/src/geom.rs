//! Affine geometry over F_q: points, flats, spans, incidence and collinear
//! triples.
//!
//! Points of `F_q^n` are addressed by an index in `[0, q^n)`: the base-q
//! number whose digits are the coordinate encodings, first coordinate most
//! significant. Index order is therefore lexicographic order on points.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldCtx};

/// Default cap for point and flat enumerations.
pub const ENUMERATION_CAP: u128 = 100_000_000;

/// The ambient space `F_q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    field: FieldCtx,
    n: usize,
    size: u32,
}

impl Space {
    pub fn new(field: FieldCtx, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams(
                "ambient dimension must be at least 1".into(),
            ));
        }
        let size = (field.q() as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if size > ENUMERATION_CAP {
            return Err(Error::TooLarge {
                size,
                cap: ENUMERATION_CAP,
            });
        }
        Ok(Space {
            field,
            n,
            size: size as u32,
        })
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Number of points, `q^n`.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn encode(&self, coords: &[Fe]) -> u32 {
        debug_assert_eq!(coords.len(), self.n);
        let q = self.q();
        coords.iter().fold(0u32, |acc, c| acc * q + c.0)
    }

    pub fn decode_into(&self, mut idx: u32, out: &mut [Fe]) {
        let q = self.q();
        for slot in out.iter_mut().rev() {
            *slot = Fe(idx % q);
            idx /= q;
        }
    }

    pub fn decode(&self, idx: u32) -> AffinePoint {
        let mut v = vec![Fe::ZERO; self.n];
        self.decode_into(idx, &mut v);
        AffinePoint(v)
    }

    pub fn point_index(&self, p: &AffinePoint) -> Result<u32> {
        if p.0.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: p.0.len(),
            });
        }
        if let Some(c) = p.0.iter().find(|c| c.0 >= self.q()) {
            return Err(Error::InvalidParams(format!(
                "coordinate {c} not below q = {}",
                self.q()
            )));
        }
        Ok(self.encode(&p.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffinePoint(pub Vec<Fe>);

impl AffinePoint {
    pub fn from_u32s(coords: &[u32]) -> Self {
        AffinePoint(coords.iter().map(|&c| Fe(c)).collect())
    }
}

impl Serialize for Fe {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

impl<'de> Deserialize<'de> for Fe {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        u32::deserialize(d).map(Fe)
    }
}

impl fmt::Display for AffinePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A finite subset of `F_q^n`, stored as sorted point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    space: Space,
    idx: Vec<u32>,
}

impl PointSet {
    pub fn new(space: Space, points: &[AffinePoint]) -> Result<Self> {
        let idx = points
            .iter()
            .map(|p| space.point_index(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_indices(space, idx))
    }

    pub fn from_indices(space: Space, mut idx: Vec<u32>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        debug_assert!(idx.last().map_or(true, |&i| i < space.size()));
        PointSet { space, idx }
    }

    /// Indices must already be sorted and distinct.
    pub fn from_sorted(space: Space, idx: Vec<u32>) -> Self {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        PointSet { space, idx }
    }

    pub fn empty(space: Space) -> Self {
        PointSet {
            space,
            idx: Vec::new(),
        }
    }

    pub fn full(space: Space) -> Self {
        let idx = (0..space.size()).collect();
        PointSet { space, idx }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn field(&self) -> &FieldCtx {
        &self.space.field
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.idx
    }

    pub fn contains(&self, idx: u32) -> bool {
        self.idx.binary_search(&idx).is_ok()
    }

    pub fn points(&self) -> impl Iterator<Item = AffinePoint> + '_ {
        self.idx.iter().map(|&i| self.space.decode(i))
    }

    pub fn subset(&self, idx: Vec<u32>) -> PointSet {
        PointSet::from_indices(self.space.clone(), idx)
    }

    /// Membership bitmap over the whole space.
    pub fn bitmap(&self) -> Vec<bool> {
        let mut bits = vec![false; self.space.size() as usize];
        for &i in &self.idx {
            bits[i as usize] = true;
        }
        bits
    }

    /// Text form: header `p^e n m`, then one comma-separated point per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.field().order_spelling(),
            self.space.n,
            self.idx.len()
        );
        for p in self.points() {
            out.push_str(&p.to_string());
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
            .ok_or_else(|| Error::Parse("empty point-set file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let [order, n, m] = parts.as_slice() else {
            return Err(Error::Parse(format!("bad point-set header `{header}`")));
        };
        let parse_u = |t: &str| {
            t.parse::<u64>()
                .map_err(|e| Error::Parse(format!("{t}: {e}")))
        };
        let field = match order.split_once('^') {
            Some((p, e)) => FieldCtx::new(parse_u(p)?, parse_u(e)? as u32)?,
            None => FieldCtx::from_order(parse_u(order)?)?,
        };
        let n = parse_u(n)? as usize;
        let m = parse_u(m)? as usize;
        let space = Space::new(field, n)?;
        let mut pts = Vec::with_capacity(m);
        for line in lines {
            let coords = line
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map(Fe)
                        .map_err(|e| Error::Parse(format!("{t}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            pts.push(AffinePoint(coords));
        }
        if pts.len() != m {
            return Err(Error::Parse(format!(
                "header promises {m} points, found {}",
                pts.len()
            )));
        }
        PointSet::new(space, &pts)
    }
}

/// Reduced row-echelon form of `rows` over F_q. Returns the nonzero rows
/// and their pivot columns.
pub fn rref(ctx: &FieldCtx, mut rows: Vec<Vec<Fe>>) -> (Vec<Vec<Fe>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = ctx.inv(rows[r][col]);
        for x in rows[r].iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col];
                for j in 0..ncols {
                    let v = ctx.mul(f, rows[r][j]);
                    rows[i][j] = ctx.sub(rows[i][j], v);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// A k-dimensional affine subspace in canonical form: the direction space
/// in reduced row-echelon form and the base point with zeros at all pivot
/// columns (the lexicographically least point of the flat).
///
/// The derived order (basis, then base) is the canonical flat order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flat {
    basis: Vec<Vec<Fe>>,
    base: AffinePoint,
}

impl Flat {
    /// Canonical flat through `base` with directions spanned by `dirs`.
    pub fn new(ctx: &FieldCtx, base: AffinePoint, dirs: Vec<Vec<Fe>>) -> Flat {
        let n = base.0.len();
        let dirs: Vec<Vec<Fe>> = dirs
            .into_iter()
            .filter(|d| d.iter().any(|c| !c.is_zero()))
            .collect();
        let (basis, pivots) = if dirs.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            rref(ctx, dirs)
        };
        let mut b = base.0;
        debug_assert_eq!(b.len(), n);
        for (row, &pc) in basis.iter().zip(&pivots) {
            let f = b[pc];
            if !f.is_zero() {
                for j in 0..n {
                    b[j] = ctx.sub(b[j], ctx.mul(f, row[j]));
                }
            }
        }
        Flat {
            basis,
            base: AffinePoint(b),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.0.len()
    }

    pub fn base(&self) -> &AffinePoint {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<Fe>] {
        &self.basis
    }

    fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.basis
            .iter()
            .map(|row| row.iter().position(|c| !c.is_zero()).expect("nonzero row"))
    }

    pub fn contains(&self, ctx: &FieldCtx, coords: &[Fe]) -> bool {
        let n = coords.len();
        let mut v: Vec<Fe> = coords
            .iter()
            .zip(&self.base.0)
            .map(|(&a, &b)| ctx.sub(a, b))
            .collect();
        for (row, pc) in self.basis.iter().zip(self.pivots()) {
            let f = v[pc];
            if !f.is_zero() {
                for j in pc..n {
                    v[j] = ctx.sub(v[j], ctx.mul(f, row[j]));
                }
            }
        }
        v.iter().all(|c| c.is_zero())
    }

    pub fn contains_index(&self, space: &Space, idx: u32) -> bool {
        let mut c = vec![Fe::ZERO; space.n()];
        space.decode_into(idx, &mut c);
        self.contains(space.field(), &c)
    }

    /// All `q^k` point indices of the flat, sorted.
    pub fn point_indices(&self, space: &Space) -> Vec<u32> {
        let ctx = space.field();
        let q = ctx.q();
        let k = self.dim();
        let count = (q as usize).pow(k as u32);
        let mut out = Vec::with_capacity(count);
        let mut t = vec![0u32; k];
        let mut coords = vec![Fe::ZERO; space.n()];
        for _ in 0..count {
            coords.copy_from_slice(&self.base.0);
            for (row, &tj) in self.basis.iter().zip(&t) {
                if tj != 0 {
                    for (c, &r) in coords.iter_mut().zip(row) {
                        *c = ctx.add(*c, ctx.mul(Fe(tj), r));
                    }
                }
            }
            out.push(space.encode(&coords));
            for slot in t.iter_mut().rev() {
                *slot += 1;
                if *slot < q {
                    break;
                }
                *slot = 0;
            }
        }
        out.sort_unstable();
        out
    }

    /// Text encoding `base;dir1;dir2...` with comma-separated coordinates.
    pub fn encoding(&self) -> String {
        let mut parts = vec![self.base.to_string()];
        parts.extend(
            self.basis
                .iter()
                .map(|r| AffinePoint(r.clone()).to_string()),
        );
        parts.join(";")
    }
}

impl fmt::Display for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encoding())
    }
}

/// Minimal affine subspace containing the given points.
pub fn span(points: &PointSet) -> Result<Flat> {
    span_indices(points.space(), points.indices())
}

pub fn span_indices(space: &Space, idx: &[u32]) -> Result<Flat> {
    let (&first, rest) = idx.split_first().ok_or(Error::EmptyInput)?;
    let ctx = space.field();
    let base = space.decode(first);
    let dirs = rest
        .iter()
        .map(|&i| {
            let p = space.decode(i);
            p.0.iter()
                .zip(&base.0)
                .map(|(&a, &b)| ctx.sub(a, b))
                .collect()
        })
        .collect();
    Ok(Flat::new(ctx, base, dirs))
}

/// Rank of the difference vectors of `idx` (the dimension of their span).
pub fn span_dim(space: &Space, idx: &[u32]) -> usize {
    span_indices(space, idx).map_or(0, |f| f.dim())
}

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: u32, k: u32, q: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.saturating_mul(q.saturating_pow(n - i).saturating_sub(1));
        den = den.saturating_mul(q.saturating_pow(i + 1) - 1);
    }
    if num == u128::MAX {
        return u128::MAX;
    }
    num / den
}

/// Number of k-flats in `AG(n, q)`: `q^{n-k} [n choose k]_q`.
pub fn flat_count(q: u32, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (q as u128)
        .saturating_pow((n - k) as u32)
        .saturating_mul(gaussian_binomial(n as u32, k as u32, q as u128))
}

/// Every k-flat of `F_q^n` exactly once, in canonical order.
pub fn enumerate_flats(ctx: &FieldCtx, n: usize, k: usize) -> Result<Vec<Flat>> {
    enumerate_flats_capped(ctx, n, k, ENUMERATION_CAP / 10)
}

pub fn enumerate_flats_capped(ctx: &FieldCtx, n: usize, k: usize, cap: u128) -> Result<Vec<Flat>> {
    if k > n || n == 0 {
        return Err(Error::InvalidParams(format!(
            "need 0 ≤ k ≤ n, got k = {k}, n = {n}"
        )));
    }
    let total = flat_count(ctx.q(), n, k);
    if total > cap {
        return Err(Error::TooLarge { size: total, cap });
    }
    let q = ctx.q();
    let mut bases_rref: Vec<Vec<Vec<Fe>>> = Vec::new();
    for pivots in combinations(n, k) {
        // free slots: (row, col) with col > pivot[row] and col not a pivot
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                (pc + 1..n)
                    .filter(|c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut vals = vec![0u32; slots.len()];
        loop {
            let mut rows = vec![vec![Fe::ZERO; n]; k];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = Fe::ONE;
            }
            for (&(r, c), &v) in slots.iter().zip(&vals) {
                rows[r][c] = Fe(v);
            }
            bases_rref.push(rows);
            if !bump(&mut vals, q) {
                break;
            }
        }
    }
    let mut flats: Vec<Flat> = bases_rref
        .into_par_iter()
        .flat_map_iter(|basis| {
            let pivots: Vec<usize> = basis
                .iter()
                .map(|row| row.iter().position(|c| !c.is_zero()).unwrap())
                .collect();
            let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
            let count = (q as usize).pow(free.len() as u32);
            let mut vals = vec![0u32; free.len()];
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let mut base = vec![Fe::ZERO; n];
                for (&c, &v) in free.iter().zip(&vals) {
                    base[c] = Fe(v);
                }
                out.push(Flat {
                    basis: basis.clone(),
                    base: AffinePoint(base),
                });
                bump(&mut vals, q);
            }
            out
        })
        .collect();
    flats.par_sort_unstable();
    Ok(flats)
}

/// Odometer increment in base `q`; false after wrapping around.
fn bump(vals: &mut [u32], q: u32) -> bool {
    for slot in vals.iter_mut().rev() {
        *slot += 1;
        if *slot < q {
            return true;
        }
        *slot = 0;
    }
    false
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn collinear(
    ctx: &FieldCtx,
    a: &AffinePoint,
    b: &AffinePoint,
    c: &AffinePoint,
) -> Result<bool> {
    let n = a.0.len();
    if b.0.len() != n || c.0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if b.0.len() != n { b.0.len() } else { c.0.len() },
        });
    }
    if a == b || a == c || b == c {
        return Err(Error::DegenerateTriple);
    }
    let u: Vec<Fe> = b.0.iter().zip(&a.0).map(|(&x, &y)| ctx.sub(x, y)).collect();
    let v: Vec<Fe> = c.0.iter().zip(&a.0).map(|(&x, &y)| ctx.sub(x, y)).collect();
    // rank {u, v} ≤ 1 iff every 2x2 minor vanishes
    for i in 0..n {
        for j in i + 1..n {
            let det = ctx.sub(ctx.mul(u[i], v[j]), ctx.mul(u[j], v[i]));
            if !det.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn require_plane(space: &Space) -> Result<()> {
    if space.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: space.n(),
        });
    }
    Ok(())
}

/// Line identifier in `AG(2, q)` of the line through point `idx` in
/// direction class `dir`: `dir < q` is the slope `m` of `y = m x + b`
/// (id `m q + b`), `dir = q` is vertical (`x = c`, id `q^2 + c`).
#[inline]
pub fn plane_line_id(ctx: &FieldCtx, idx: u32, dir: u32) -> u32 {
    let q = ctx.q();
    let (x, y) = (idx / q, idx % q);
    if dir == q {
        q * q + x
    } else {
        let b = ctx.sub(Fe(y), ctx.mul(Fe(dir), Fe(x)));
        dir * q + b.0
    }
}

fn choose3(c: u64) -> u64 {
    if c < 3 {
        0
    } else {
        c * (c - 1) * (c - 2) / 6
    }
}

/// Points of `P` grouped by the lines of `AG(2, q)`, keyed by line id. Only
/// lines with at least `min` points are kept.
pub fn plane_line_buckets(p: &PointSet, min: usize) -> Result<BTreeMap<u32, Vec<u32>>> {
    require_plane(p.space())?;
    let ctx = p.field();
    let q = ctx.q();
    let mut buckets: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for dir in 0..=q {
        for &i in p.indices() {
            buckets
                .entry(plane_line_id(ctx, i, dir))
                .or_default()
                .push(i);
        }
    }
    buckets.retain(|_, v| v.len() >= min);
    Ok(buckets)
}

/// Exact number of collinear triples of a planar point set, summing
/// `C(|P ∩ L|, 3)` over lines.
pub fn count_collinear_triples(p: &PointSet) -> Result<u64> {
    require_plane(p.space())?;
    let ctx = p.field();
    let q = ctx.q();
    let total: u64 = (0..=q)
        .into_par_iter()
        .map(|dir| {
            let mut counts = vec![0u32; q as usize];
            for &i in p.indices() {
                let id = plane_line_id(ctx, i, dir);
                let slot = if dir == q { id - q * q } else { id - dir * q };
                counts[slot as usize] += 1;
            }
            counts.iter().map(|&c| choose3(c as u64)).sum::<u64>()
        })
        .sum();
    Ok(total)
}

/// Cubic recount of collinear triples, used as an oracle.
pub fn count_collinear_triples_brute(p: &PointSet) -> Result<u64> {
    require_plane(p.space())?;
    let ctx = p.field();
    let pts: Vec<AffinePoint> = p.points().collect();
    let mut count = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                if collinear(ctx, &pts[i], &pts[j], &pts[k])? {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Supersaturation lower bound on collinear triples among `m` points of
/// `F_q^2`: `m (q+1) x (x-1) / 6` with `x = (m-1)/(q+1)`, clamped at zero.
pub fn supersat_lower_bound(m: u64, q: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let q1 = (q + 1) as f64;
    let x = (m as f64 - 1.0) / q1;
    let raw = m as f64 * q1 * x * (x - 1.0) / 6.0;
    raw.max(0.0)
}

/// The `q` points `(x, x^2, ..., x^n)`.
pub fn moment_curve(ctx: &FieldCtx, n: usize) -> Result<PointSet> {
    let space = Space::new(ctx.clone(), n)?;
    let idx = ctx
        .elements()
        .map(|x| {
            let mut coords = Vec::with_capacity(n);
            let mut acc = x;
            for _ in 0..n {
                coords.push(acc);
                acc = ctx.mul(acc, x);
            }
            space.encode(&coords)
        })
        .collect();
    Ok(PointSet::from_indices(space, idx))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceProfile {
    pub max_count: usize,
    /// Least flat (canonical order) achieving `max_count`.
    pub argmax: Flat,
    /// Number of flats per intersection size.
    pub histogram: BTreeMap<usize, u64>,
}

/// Intersection sizes of `P` with every k-flat.
pub fn incidence_profile(p: &PointSet, k: usize) -> Result<IncidenceProfile> {
    let space = p.space();
    let flats = enumerate_flats(space.field(), space.n(), k)?;
    incidence_profile_over(p, &flats)
}

/// As [`incidence_profile`], over a precomputed flat list in canonical order.
pub fn incidence_profile_over(p: &PointSet, flats: &[Flat]) -> Result<IncidenceProfile> {
    if flats.is_empty() {
        return Err(Error::EmptyInput);
    }
    let space = p.space();
    let ctx = space.field();
    let k = flats[0].dim();
    let flat_size = (space.q() as u128).pow(k as u32);
    let coords: Vec<AffinePoint> = p.points().collect();
    let bits = if (p.len() as u128) > flat_size {
        Some(p.bitmap())
    } else {
        None
    };
    let counts: Vec<usize> = flats
        .par_iter()
        .map(|f| match &bits {
            Some(bits) => f
                .point_indices(space)
                .iter()
                .filter(|&&i| bits[i as usize])
                .count(),
            None => coords.iter().filter(|c| f.contains(ctx, &c.0)).count(),
        })
        .collect();
    let mut histogram = BTreeMap::new();
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        *histogram.entry(c).or_insert(0) += 1;
        if c > counts[best] {
            best = i;
        }
    }
    Ok(IncidenceProfile {
        max_count: counts[best],
        argmax: flats[best].clone(),
        histogram,
    })
}

/// Flats with their point lists and the flats through each point, for
/// repeated rich-flat searches on subsets of a small space.
#[derive(Clone, Debug)]
pub struct IncidenceIndex {
    space: Space,
    flats: Vec<Flat>,
    members: Vec<Vec<u32>>,
    through: Vec<Vec<u32>>,
}

impl IncidenceIndex {
    pub fn new(space: &Space, k: usize) -> Result<Self> {
        let flats = enumerate_flats(space.field(), space.n(), k)?;
        let storage = flats.len() as u128 * (space.q() as u128).pow(k as u32);
        if storage > ENUMERATION_CAP {
            return Err(Error::TooLarge {
                size: storage,
                cap: ENUMERATION_CAP,
            });
        }
        let members: Vec<Vec<u32>> = flats.par_iter().map(|f| f.point_indices(space)).collect();
        let mut through = vec![Vec::new(); space.size() as usize];
        for (fi, m) in members.iter().enumerate() {
            for &pt in m {
                through[pt as usize].push(fi as u32);
            }
        }
        Ok(IncidenceIndex {
            space: space.clone(),
            flats,
            members,
            through,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn members(&self, flat: usize) -> &[u32] {
        &self.members[flat]
    }

    pub fn through(&self, point: u32) -> &[u32] {
        &self.through[point as usize]
    }

    /// `|C ∩ F|` for every flat F.
    pub fn counts(&self, c: &[u32]) -> Vec<u32> {
        let mut counts = vec![0u32; self.flats.len()];
        for &pt in c {
            for &f in &self.through[pt as usize] {
                counts[f as usize] += 1;
            }
        }
        counts
    }

    /// Flat with the largest intersection with `c` (least flat on ties).
    pub fn richest(&self, c: &[u32]) -> Option<(usize, u32)> {
        let counts = self.counts(c);
        let mut best: Option<(usize, u32)> = None;
        for (i, &n) in counts.iter().enumerate() {
            if best.map_or(true, |(_, b)| n > b) {
                best = Some((i, n));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(q: u64) -> Space {
        Space::new(FieldCtx::from_order(q).unwrap(), 2).unwrap()
    }

    fn pts(space: &Space, raw: &[[u32; 2]]) -> PointSet {
        let v: Vec<AffinePoint> = raw.iter().map(|c| AffinePoint::from_u32s(c)).collect();
        PointSet::new(space.clone(), &v).unwrap()
    }

    #[test]
    fn span_examples() {
        let s5 = plane(5);
        let f = span(&pts(&s5, &[[0, 0], [1, 1]])).unwrap();
        assert_eq!(f.dim(), 1);
        assert_eq!(f.basis(), &[vec![Fe(1), Fe(1)]]);
        assert_eq!(f.point_indices(&s5).len(), 5);
        assert!(f.contains(s5.field(), &[Fe(3), Fe(3)]));

        let f = span(&pts(&s5, &[[2, 3]])).unwrap();
        assert_eq!(f.dim(), 0);
        assert_eq!(f.base(), &AffinePoint::from_u32s(&[2, 3]));

        let s3 = plane(3);
        assert_eq!(span(&pts(&s3, &[[0, 0], [1, 0], [0, 1]])).unwrap().dim(), 2);
        assert!(matches!(span(&PointSet::empty(s3)), Err(Error::EmptyInput)));
    }

    #[test]
    fn flat_counts() {
        let f3 = FieldCtx::new(3, 1).unwrap();
        assert_eq!(enumerate_flats(&f3, 2, 1).unwrap().len(), 12);
        let f2 = FieldCtx::new(2, 1).unwrap();
        assert_eq!(enumerate_flats(&f2, 3, 2).unwrap().len(), 14);
        assert_eq!(enumerate_flats(&f3, 3, 0).unwrap().len(), 27);
        assert_eq!(flat_count(5, 4, 2), 25 * gaussian_binomial(4, 2, 5));
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
    }

    #[test]
    fn flats_dedup_by_point_sets() {
        for (q, n, k) in [
            (3u64, 2usize, 1usize),
            (2, 3, 2),
            (2, 3, 1),
            (4, 2, 1),
            (3, 3, 2),
        ] {
            let space = Space::new(FieldCtx::from_order(q).unwrap(), n).unwrap();
            let flats = enumerate_flats(space.field(), n, k).unwrap();
            let mut sets: Vec<Vec<u32>> = flats.iter().map(|f| f.point_indices(&space)).collect();
            assert!(sets.iter().all(|s| s.len() == (q as usize).pow(k as u32)));
            sets.sort();
            sets.dedup();
            assert_eq!(sets.len(), flats.len());
            // canonical form is recovered from the point set
            for f in &flats {
                let again = span_indices(&space, &f.point_indices(&space)).unwrap();
                assert_eq!(&again, f);
            }
        }
    }

    #[test]
    fn collinear_examples() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let p = |a, b| AffinePoint::from_u32s(&[a, b]);
        assert!(collinear(&f5, &p(0, 0), &p(1, 1), &p(2, 2)).unwrap());
        assert!(!collinear(&f5, &p(0, 0), &p(1, 1), &p(2, 4)).unwrap());
        assert!(matches!(
            collinear(&f5, &p(0, 0), &p(0, 0), &p(1, 1)),
            Err(Error::DegenerateTriple)
        ));
    }

    #[test]
    fn triple_counts() {
        let s3 = plane(3);
        let full = PointSet::full(s3);
        assert_eq!(count_collinear_triples(&full).unwrap(), 12);
        assert_eq!(count_collinear_triples_brute(&full).unwrap(), 12);
        let f5 = FieldCtx::new(5, 1).unwrap();
        let mc = moment_curve(&f5, 2).unwrap();
        assert_eq!(count_collinear_triples(&mc).unwrap(), 0);
        assert_eq!(count_collinear_triples_brute(&mc).unwrap(), 0);
        let s5 = plane(5);
        let line = pts(&s5, &[[0, 0], [1, 1], [2, 2], [3, 3], [4, 4]]);
        assert_eq!(count_collinear_triples(&line).unwrap(), 10);
    }

    #[test]
    fn supersat_bound_examples() {
        assert_eq!(supersat_lower_bound(9, 3), 12.0);
        assert_eq!(supersat_lower_bound(5, 4), 0.0);
        assert_eq!(supersat_lower_bound(0, 7), 0.0);
    }

    #[test]
    fn moment_curve_points() {
        let f5 = FieldCtx::new(5, 1).unwrap();
        let mc = moment_curve(&f5, 2).unwrap();
        let got: Vec<AffinePoint> = mc.points().collect();
        let want: Vec<AffinePoint> = [[0, 0], [1, 1], [2, 4], [3, 4], [4, 1]]
            .iter()
            .map(|c| AffinePoint::from_u32s(c))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn profile_examples() {
        let s5 = plane(5);
        let line = pts(&s5, &[[0, 2], [1, 2], [2, 2], [3, 2], [4, 2]]);
        let prof = incidence_profile(&line, 1).unwrap();
        assert_eq!(prof.max_count, 5);
        assert_eq!(prof.argmax, span(&line).unwrap());
        assert_eq!(prof.histogram.values().sum::<u64>(), 30);

        let f7 = FieldCtx::new(7, 1).unwrap();
        let mc = moment_curve(&f7, 2).unwrap();
        assert_eq!(incidence_profile(&mc, 1).unwrap().max_count, 2);
        assert_eq!(
            incidence_profile(&PointSet::empty(s5), 1)
                .unwrap()
                .max_count,
            0
        );
    }

    #[test]
    fn plane_lines_have_q_points_and_q_plus_one_through_each_point() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13] {
            let space = plane(q);
            let idx = IncidenceIndex::new(&space, 1).unwrap();
            assert_eq!(idx.flats().len() as u64, q * q + q);
            assert!((0..idx.flats().len()).all(|f| idx.members(f).len() as u64 == q));
            assert!((0..space.size()).all(|p| idx.through(p).len() as u64 == q + 1));
        }
    }

    #[test]
    fn plane_line_ids_match_flats() {
        let space = plane(7);
        let ctx = space.field();
        let full = PointSet::full(space.clone());
        let buckets = plane_line_buckets(&full, 0).unwrap();
        let mut from_ids: Vec<Vec<u32>> = buckets.into_values().collect();
        let mut from_flats: Vec<Vec<u32>> = enumerate_flats(ctx, 2, 1)
            .unwrap()
            .iter()
            .map(|f| f.point_indices(&space))
            .collect();
        from_ids.sort();
        from_flats.sort();
        assert_eq!(from_ids, from_flats);
    }

    #[test]
    fn point_set_text_round_trip() {
        let f4 = FieldCtx::new(2, 2).unwrap();
        let space = Space::new(f4, 3).unwrap();
        let s = PointSet::from_indices(space, vec![5, 1, 63, 17]);
        let text = s.to_text();
        assert!(text.starts_with("2^2 3 4\n"));
        assert_eq!(PointSet::parse_text(&text).unwrap(), s);
    }
}
