//! Evasive sets: bounds calculators, exhaustive verification and the
//! random-algebraic constructor.
//!
//! A point set `S ⊆ F_q^n` is (d,k,r)-evasive when every variety of
//! dimension k and degree at most d meets it in fewer than r points.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldCtx};
use crate::geom::{self, Flat, PointSet, Space};
use crate::poly::{binomial, monomials, sample_poly, zero_locus_affine, MultiPoly};
use crate::rng::RandomStream;

/// Cap on `curves × points` evaluations for curve verification.
pub const CURVE_EVALUATION_CAP: u128 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EvasiveParams {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    pub r: usize,
    pub q: u32,
}

impl EvasiveParams {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > self.n || self.d < 1 || self.r < 1 || self.q < 2 {
            return Err(Error::InvalidParams(format!(
                "need 1 ≤ k ≤ n, d ≥ 1, r ≥ 1, q ≥ 2; got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn with_r(self, r: usize) -> Self {
        EvasiveParams { r, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSchedule {
    pub degrees: Vec<u64>,
    pub chow_dimension: u128,
    pub r_value: u128,
    pub degree_product: u128,
}

/// `floor((r-1) q^{n-k} / d)`: the most points a (d,k,r)-evasive set can
/// have, since `F_q^n` splits into `q^{n-k}` parallel k-flats.
pub fn slice_bound(params: &EvasiveParams) -> u128 {
    let slices = (params.q as u128).pow((params.n - params.k) as u32);
    (params.r as u128 - 1) * slices / params.d as u128
}

/// Dimension of the Chow variety of degree-d, dimension-k cycles in `P^n`:
/// `max{d(k+1)(n-k), C(d+k+1, k+1) - 1 + (k+2)(n-k-1)}`, for `k < n`.
pub fn chow_dim(d: u64, k: u64, n: u64) -> u128 {
    assert!(d >= 1 && k < n, "chow_dim needs d ≥ 1 and k < n");
    let a = d as u128 * (k as u128 + 1) * (n - k) as u128;
    let b = binomial(d + k + 1, k + 1) - 1 + (k as u128 + 2) * (n - k - 1) as u128;
    a.max(b)
}

/// Minimal degrees `d_i` with `C(d_i + k + 1 - i, k + 1 - i) > chow_dim(d, k, n)`.
///
/// For `k = n` the Chow dimension is taken as 0, so every `d_i` is 1.
pub fn degree_schedule(n: usize, k: usize, d: u32) -> Result<DegreeSchedule> {
    if k < 1 || k > n || d < 1 {
        return Err(Error::InvalidParams(format!(
            "need 1 ≤ k ≤ n and d ≥ 1; got n={n} k={k} d={d}"
        )));
    }
    let chow = if k == n {
        0
    } else {
        chow_dim(d as u64, k as u64, n as u64)
    };
    let degrees: Vec<u64> = (1..=k)
        .map(|i| {
            let j = (k + 1 - i) as u64;
            minimal_degree(j, chow)
        })
        .collect();
    let degree_product = degrees.iter().map(|&x| x as u128).product::<u128>();
    Ok(DegreeSchedule {
        r_value: d as u128 * degree_product,
        degrees,
        chow_dimension: chow,
        degree_product,
    })
}

/// Least `x ≥ 1` with `C(x + j, j) > target`.
fn minimal_degree(j: u64, target: u128) -> u64 {
    let ok = |x: u64| binomial(x + j, j) > target;
    let mut hi = 1u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2; // ok(lo) is false unless lo == 0
    if lo == 0 {
        return 1;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Concrete value of the degree bound of a twisted variety: the product of
/// the schedule's degrees.
pub fn twisted_degree_bound(n: usize, k: usize, d: u32) -> Result<u128> {
    Ok(degree_schedule(n, k, d)?.degree_product)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Flat(Flat),
    Curve(MultiPoly),
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Flat(_) => "flat",
            Witness::Curve(_) => "curve",
        }
    }

    pub fn encoding(&self) -> String {
        match self {
            Witness::Flat(f) => f.encoding(),
            Witness::Curve(p) => p.to_text().trim().replace('\n', " | "),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvasiveVerdict {
    pub evasive: bool,
    /// Threshold the set was checked against.
    pub r: usize,
    /// Largest intersection with an admissible variety.
    pub max_intersection: usize,
    /// Present iff not evasive.
    pub witness: Option<Witness>,
}

impl EvasiveVerdict {
    pub fn witness_kind(&self) -> &'static str {
        self.witness.as_ref().map_or("none", Witness::kind)
    }

    pub fn witness_encoding(&self) -> String {
        self.witness
            .as_ref()
            .map_or_else(String::new, Witness::encoding)
    }
}

fn check_space(s: &PointSet, params: &EvasiveParams) -> Result<()> {
    params.validate()?;
    if s.space().n() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            got: s.space().n(),
        });
    }
    if s.space().q() != params.q {
        return Err(Error::InvalidParams(format!(
            "point set lives over F_{}, parameters say q = {}",
            s.space().q(),
            params.q
        )));
    }
    Ok(())
}

/// Exhaustive evasiveness check. For `d = 1` all k-flats are checked; for
/// `d ≥ 2` only plane curves (`n = 2`, `k = 1`) are supported.
pub fn is_evasive(s: &PointSet, params: &EvasiveParams) -> Result<EvasiveVerdict> {
    check_space(s, params)?;
    if params.d == 1 {
        let prof = geom::incidence_profile(s, params.k)?;
        let evasive = prof.max_count < params.r;
        return Ok(EvasiveVerdict {
            evasive,
            r: params.r,
            max_intersection: prof.max_count,
            witness: (!evasive).then_some(Witness::Flat(prof.argmax)),
        });
    }
    if params.n != 2 || params.k != 1 {
        return Err(Error::Unsupported(format!(
            "degree-{} verification is only implemented for plane curves (n = 2, k = 1)",
            params.d
        )));
    }
    let (max, poly) = richest_curve(s, params.d)?;
    let evasive = max < params.r;
    Ok(EvasiveVerdict {
        evasive,
        r: params.r,
        max_intersection: max,
        witness: (!evasive).then_some(Witness::Curve(poly)),
    })
}

/// Plane curve of degree ≤ d (one per projective class of nonconstant
/// coefficient vectors) meeting `s` most often; least in enumeration order
/// on ties.
pub fn richest_curve(s: &PointSet, d: u32) -> Result<(usize, MultiPoly)> {
    let ctx = s.field().clone();
    let q = ctx.q() as u128;
    let monos = monomials(2, d, false);
    let m = monos.len();
    let classes = (q.pow(m as u32) - 1) / (q - 1) - 1;
    let work = classes.saturating_mul(s.len().max(1) as u128);
    if work > CURVE_EVALUATION_CAP {
        return Err(Error::TooLarge {
            size: work,
            cap: CURVE_EVALUATION_CAP,
        });
    }
    // values[p * m + j] = monomial j at point p
    let mut values = Vec::with_capacity(s.len() * m);
    for pt in s.points() {
        let (x, y) = (pt.0[0], pt.0[1]);
        for mono in &monos {
            values.push(ctx.mul(ctx.pow(x, mono[0] as u64), ctx.pow(y, mono[1] as u64)));
        }
    }
    let npts = s.len();
    // class index -> (leading position, tail counter); the constant class
    // (leading position 0, zero tail) is skipped by starting at 1
    let decode = |mut idx: u128| -> Vec<Fe> {
        let mut lead = 0;
        loop {
            let block = q.pow((m - 1 - lead) as u32);
            if idx < block {
                break;
            }
            idx -= block;
            lead += 1;
        }
        let mut c = vec![Fe::ZERO; m];
        c[lead] = Fe::ONE;
        for j in (lead + 1..m).rev() {
            c[j] = Fe((idx % q) as u32);
            idx /= q;
        }
        c
    };
    let count_of = |c: &[Fe]| -> usize {
        (0..npts)
            .filter(|&p| {
                let row = &values[p * m..(p + 1) * m];
                let mut acc = Fe::ZERO;
                for (a, b) in c.iter().zip(row) {
                    if !a.is_zero() {
                        acc = ctx.add(acc, ctx.mul(*a, *b));
                    }
                }
                acc.is_zero()
            })
            .count()
    };
    let total = classes + 1;
    let chunk = 4096u128;
    let nchunks = total.div_ceil(chunk);
    let best = (0..nchunks)
        .into_par_iter()
        .map(|ci| {
            let mut best: (usize, u128) = (0, u128::MAX);
            for idx in ci * chunk..((ci + 1) * chunk).min(total) {
                if idx == 0 {
                    continue;
                }
                let c = decode(idx);
                let n = count_of(&c);
                if n > best.0 || best.1 == u128::MAX {
                    best = (n, idx);
                }
            }
            best
        })
        .reduce(
            || (0, u128::MAX),
            |a, b| {
                if a.1 == u128::MAX {
                    b
                } else if b.1 == u128::MAX {
                    a
                } else if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    let poly = MultiPoly::new(2, d, false, decode(best.1))?;
    Ok((best.0, poly))
}

/// `|S ∩ W|` recomputed from scratch for a witness.
pub fn witness_intersection(s: &PointSet, w: &Witness) -> Result<usize> {
    let space = s.space();
    match w {
        Witness::Flat(f) => Ok(s
            .indices()
            .iter()
            .filter(|&&i| f.contains_index(space, i))
            .count()),
        Witness::Curve(p) => {
            let ctx = s.field();
            let mut n = 0;
            for pt in s.points() {
                if p.evaluate(ctx, &pt.0)?.is_zero() {
                    n += 1;
                }
            }
            Ok(n)
        }
    }
}

/// Whether a verified evasive set respects the slice bound.
pub fn check_slice_consistency(
    s: &PointSet,
    params: &EvasiveParams,
    verdict: &EvasiveVerdict,
) -> bool {
    debug_assert!(verdict.evasive);
    s.len() as u128 <= slice_bound(&params.with_r(verdict.r))
}

/// Result of [`construct_evasive`].
#[derive(Clone, Debug)]
pub struct Construction {
    pub candidate: PointSet,
    pub schedule: DegreeSchedule,
    /// Verdict against `verify_r = r_value + 1`, the Bézout-sound threshold.
    pub verdict: EvasiveVerdict,
    /// Verdict against the schedule's own `r_value`.
    pub verdict_at_schedule: EvasiveVerdict,
    pub verify_r: usize,
    pub chart: usize,
    pub trials_used: usize,
    pub polys: Vec<MultiPoly>,
}

/// Samples complete intersections of the scheduled degrees until the
/// affine locus on the best chart is verified evasive.
pub fn construct_evasive(
    params: &EvasiveParams,
    rng: &mut RandomStream,
    attempts: usize,
) -> Result<Construction> {
    params.validate()?;
    if params.d >= 2 && (params.n != 2 || params.k != 1) {
        return Err(Error::Unsupported(format!(
            "degree-{} verification is only implemented for plane curves (n = 2, k = 1)",
            params.d
        )));
    }
    let schedule = degree_schedule(params.n, params.k, params.d)?;
    if params.q as u128 <= schedule.r_value {
        return Err(Error::InvalidParams(format!(
            "q = {} must exceed the schedule's r = {}",
            params.q, schedule.r_value
        )));
    }
    if attempts == 0 {
        return Err(Error::InvalidParams("attempts must be positive".into()));
    }
    let ctx = FieldCtx::from_order(params.q as u64)?;
    let space = Space::new(ctx.clone(), params.n)?;
    let verify_r = schedule.r_value as usize + 1;
    let mut last = None;
    for trial in 1..=attempts {
        let polys = sample_tuple(&ctx, params.n, &schedule.degrees, rng)?;
        let (chart, candidate) = best_chart(&ctx, &space, &polys)?;
        let verdict = is_evasive(&candidate, &params.with_r(verify_r))?;
        let verdict_at_schedule =
            is_evasive(&candidate, &params.with_r(schedule.r_value as usize))?;
        let c = Construction {
            candidate,
            schedule: schedule.clone(),
            verdict,
            verdict_at_schedule,
            verify_r,
            chart,
            trials_used: trial,
            polys,
        };
        if c.verdict.evasive {
            return Ok(c);
        }
        last = Some(c);
    }
    Err(Error::ExhaustedAttempts {
        attempts,
        best: Box::new(last.expect("at least one attempt")),
    })
}

/// One homogeneous polynomial in `n + 1` variables per scheduled degree.
/// A polynomial vanishing on a whole chart is resampled.
fn sample_tuple(
    ctx: &FieldCtx,
    n: usize,
    degrees: &[u64],
    rng: &mut RandomStream,
) -> Result<Vec<MultiPoly>> {
    let q = ctx.q() as u64;
    let mut out = Vec::with_capacity(degrees.len());
    for &d in degrees {
        loop {
            let f = sample_poly(ctx, n + 1, d as u32, true, rng)?;
            let degenerate = d >= q
                && (0..=n).any(|chart| {
                    let a = f.dehomogenize(chart).expect("homogeneous");
                    zero_locus_affine(&[a], ctx, n)
                        .map_or(false, |l| l.len() as u64 == q.pow(n as u32))
                });
            if !degenerate {
                out.push(f);
                break;
            }
        }
    }
    Ok(out)
}

/// Chart with the largest affine locus, lowest index on ties.
fn best_chart(ctx: &FieldCtx, space: &Space, polys: &[MultiPoly]) -> Result<(usize, PointSet)> {
    let n = space.n();
    let mut best: Option<(usize, PointSet)> = None;
    for chart in 0..=n {
        let affine = polys
            .iter()
            .map(|f| f.dehomogenize(chart))
            .collect::<Result<Vec<_>>>()?;
        let locus = zero_locus_affine(&affine, ctx, n)?;
        if best.as_ref().map_or(true, |(_, b)| locus.len() > b.len()) {
            best = Some((chart, locus));
        }
    }
    Ok(best.expect("n + 1 ≥ 1 charts"))
}
