//! Dense multivariate polynomials over F_q.
//!
//! Coefficients are indexed by monomials in lexicographic order of their
//! exponent vectors (ascending): for two variables and degree ≤ 1 the order
//! is `1, y, x`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Fe, FieldCtx};
use crate::geom::{PointSet, Space};
use crate::rng::RandomStream;

/// Default cap on the number of points enumerated by [`zero_locus_affine`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exponent vectors with total degree ≤ `degree` (or exactly `degree` when
/// `homogeneous`), in ascending lexicographic order.
pub fn monomials(nvars: usize, degree: u32, homogeneous: bool) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, exact: bool, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            if !exact || budget == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let lo = if exact && left == 1 { budget } else { 0 };
        for e in lo..=budget {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, exact, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        &mut Vec::with_capacity(nvars),
        nvars,
        degree,
        homogeneous,
        &mut out,
    );
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    degree: u32,
    homogeneous: bool,
    coeffs: Vec<Fe>,
    monos: Vec<Vec<u32>>,
}

impl MultiPoly {
    pub fn new(nvars: usize, degree: u32, homogeneous: bool, coeffs: Vec<Fe>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::InvalidParams(
                "polynomial needs at least one variable".into(),
            ));
        }
        let monos = monomials(nvars, degree, homogeneous);
        if monos.len() != coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: monos.len(),
                got: coeffs.len(),
            });
        }
        Ok(MultiPoly {
            nvars,
            degree,
            homogeneous,
            coeffs,
            monos,
        })
    }

    pub fn zero(nvars: usize, degree: u32, homogeneous: bool) -> Self {
        let len = monomials(nvars, degree, homogeneous).len();
        Self::new(nvars, degree, homogeneous, vec![Fe::ZERO; len]).expect("shape")
    }

    /// Polynomial from `(exponents, coefficient)` terms; the shape is affine
    /// of the given degree.
    pub fn from_terms(
        nvars: usize,
        degree: u32,
        terms: &[(Vec<u32>, Fe)],
        ctx: &FieldCtx,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars, degree, false);
        for (exps, c) in terms {
            let i = p.index_of(exps).ok_or_else(|| {
                Error::InvalidParams(format!("monomial {exps:?} outside degree {degree}"))
            })?;
            p.coeffs[i] = ctx.add(p.coeffs[i], *c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monos
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.monos.binary_search_by(|m| m.as_slice().cmp(exps)).ok()
    }

    pub fn evaluate(&self, ctx: &FieldCtx, point: &[Fe]) -> Result<Fe> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.eval_unchecked(ctx, point))
    }

    fn eval_unchecked(&self, ctx: &FieldCtx, point: &[Fe]) -> Fe {
        let d = self.degree as usize;
        // powers[v][j] = point[v]^j
        let mut powers = vec![Fe::ONE; self.nvars * (d + 1)];
        for (v, &x) in point.iter().enumerate() {
            for j in 1..=d {
                powers[v * (d + 1) + j] = ctx.mul(powers[v * (d + 1) + j - 1], x);
            }
        }
        let mut acc = Fe::ZERO;
        for (mono, &c) in self.monos.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let mut term = c;
            for (v, &e) in mono.iter().enumerate() {
                term = ctx.mul(term, powers[v * (d + 1) + e as usize]);
            }
            acc = ctx.add(acc, term);
        }
        acc
    }

    fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, Fe)> {
        self.monos
            .iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| !c.is_zero())
    }

    fn from_map(nvars: usize, degree: u32, map: BTreeMap<Vec<u32>, Fe>) -> Self {
        let mut p = Self::zero(nvars, degree, false);
        for (exps, c) in map {
            let i = p.index_of(&exps).expect("degree bound");
            p.coeffs[i] = c;
        }
        p
    }

    /// Sum as an affine polynomial of the larger degree.
    pub fn add(&self, other: &MultiPoly, ctx: &FieldCtx) -> Result<MultiPoly> {
        self.check_same_vars(other)?;
        let mut map: BTreeMap<Vec<u32>, Fe> = BTreeMap::new();
        for (m, c) in self.terms().chain(other.terms()) {
            let slot = map.entry(m.clone()).or_insert(Fe::ZERO);
            *slot = ctx.add(*slot, c);
        }
        Ok(Self::from_map(
            self.nvars,
            self.degree.max(other.degree),
            map,
        ))
    }

    /// Product as an affine polynomial of degree `deg f + deg g`.
    pub fn mul(&self, other: &MultiPoly, ctx: &FieldCtx) -> Result<MultiPoly> {
        self.check_same_vars(other)?;
        let mut map: BTreeMap<Vec<u32>, Fe> = BTreeMap::new();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                let exps: Vec<u32> = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                let slot = map.entry(exps).or_insert(Fe::ZERO);
                *slot = ctx.add(*slot, ctx.mul(c1, c2));
            }
        }
        Ok(Self::from_map(self.nvars, self.degree + other.degree, map))
    }

    fn check_same_vars(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    /// Restriction of a homogeneous polynomial in `n + 1` variables to the
    /// affine chart `x_chart = 1`; the remaining variables keep their order.
    pub fn dehomogenize(&self, chart: usize) -> Result<MultiPoly> {
        if !self.homogeneous {
            return Err(Error::InvalidParams(
                "dehomogenize needs a homogeneous polynomial".into(),
            ));
        }
        if chart >= self.nvars || self.nvars < 2 {
            return Err(Error::InvalidParams(format!(
                "chart {chart} out of range for {} variables",
                self.nvars
            )));
        }
        let mut out = Self::zero(self.nvars - 1, self.degree, false);
        for (m, c) in self.terms() {
            let exps: Vec<u32> = m
                .iter()
                .enumerate()
                .filter(|&(v, _)| v != chart)
                .map(|(_, &e)| e)
                .collect();
            let i = out.index_of(&exps).expect("degree bound");
            // distinct homogeneous monomials map to distinct affine ones
            out.coeffs[i] = c;
        }
        Ok(out)
    }

    /// Text form: `n_vars degree homogeneous_flag` and a coefficient line.
    pub fn to_text(&self) -> String {
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        format!(
            "{} {} {}\n{}\n",
            self.nvars,
            self.degree,
            u8::from(self.homogeneous),
            coeffs.join(" ")
        )
    }

    pub fn parse_text(s: &str, ctx: &FieldCtx) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty polynomial".into()))?;
        let h: Vec<u64> = header
            .split_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("{t}: {e}")))
            })
            .collect::<Result<_>>()?;
        let [nvars, degree, flag] = h.as_slice() else {
            return Err(Error::Parse(format!("bad polynomial header `{header}`")));
        };
        let coeffs: Vec<Fe> = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|t| {
                let v = t
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("{t}: {e}")))?;
                if v >= ctx.q() {
                    return Err(Error::Parse(format!(
                        "coefficient {v} not below q = {}",
                        ctx.q()
                    )));
                }
                Ok(Fe(v))
            })
            .collect::<Result<_>>()?;
        Self::new(*nvars as usize, *degree as u32, *flag != 0, coeffs)
    }
}

/// Uniform nonzero polynomial of the given shape.
pub fn sample_poly(
    ctx: &FieldCtx,
    nvars: usize,
    degree: u32,
    homogeneous: bool,
    rng: &mut RandomStream,
) -> Result<MultiPoly> {
    if degree == 0 || nvars == 0 {
        return Err(Error::InvalidParams(
            "sample_poly needs degree ≥ 1 and nvars ≥ 1".into(),
        ));
    }
    let len = monomials(nvars, degree, homogeneous).len();
    loop {
        let coeffs: Vec<Fe> = (0..len)
            .map(|_| Fe(rng.below(ctx.q() as u64) as u32))
            .collect();
        if coeffs.iter().any(|c| !c.is_zero()) {
            return MultiPoly::new(nvars, degree, homogeneous, coeffs);
        }
    }
}

/// Common zeros in F_q^n of `fs`. Polynomials in `n + 1` homogeneous
/// variables are read on the chart `x_0 = 1`.
pub fn zero_locus_affine(fs: &[MultiPoly], ctx: &FieldCtx, n: usize) -> Result<PointSet> {
    zero_locus_affine_capped(fs, ctx, n, DEFAULT_ENUMERATION_CAP)
}

pub fn zero_locus_affine_capped(
    fs: &[MultiPoly],
    ctx: &FieldCtx,
    n: usize,
    cap: u64,
) -> Result<PointSet> {
    let mut affine = Vec::with_capacity(fs.len());
    for f in fs {
        if f.nvars() == n {
            affine.push(f.clone());
        } else if f.nvars() == n + 1 && f.is_homogeneous() {
            affine.push(f.dehomogenize(0)?);
        } else {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.nvars(),
            });
        }
    }
    let size = (ctx.q() as u128).pow(n as u32);
    if size > cap as u128 {
        return Err(Error::TooLarge {
            size,
            cap: cap as u128,
        });
    }
    let space = Space::new(ctx.clone(), n)?;
    let mut pts = Vec::new();
    let mut coords = vec![Fe::ZERO; n];
    for idx in 0..space.size() {
        space.decode_into(idx, &mut coords);
        if affine
            .iter()
            .all(|f| f.eval_unchecked(ctx, &coords).is_zero())
        {
            pts.push(idx);
        }
    }
    Ok(PointSet::from_sorted(space, pts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldCtx {
        FieldCtx::new(p, 1).unwrap()
    }

    #[test]
    fn monomial_counts_match_binomials() {
        assert_eq!(monomials(3, 2, true).len(), 6);
        assert_eq!(monomials(2, 3, false).len() as u128, binomial(5, 2));
        assert_eq!(
            monomials(2, 1, false),
            vec![vec![0, 0], vec![0, 1], vec![1, 0]]
        );
        for n in 1..4 {
            for d in 0..5 {
                assert_eq!(
                    monomials(n, d, false).len() as u128,
                    binomial(d as u64 + n as u64, n as u64)
                );
                assert_eq!(
                    monomials(n, d, true).len() as u128,
                    binomial(d as u64 + n as u64 - 1, n as u64 - 1)
                );
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let f3 = f(3);
        // x^2 + y
        let p =
            MultiPoly::from_terms(2, 2, &[(vec![2, 0], Fe(1)), (vec![0, 1], Fe(1))], &f3).unwrap();
        assert_eq!(p.evaluate(&f3, &[Fe(1), Fe(2)]).unwrap(), Fe(0));
        let f5 = f(5);
        let xy = MultiPoly::from_terms(2, 2, &[(vec![1, 1], Fe(1))], &f5).unwrap();
        assert_eq!(xy.evaluate(&f5, &[Fe(2), Fe(3)]).unwrap(), Fe(1));
        let z = MultiPoly::zero(2, 3, false);
        assert_eq!(z.evaluate(&f5, &[Fe(4), Fe(1)]).unwrap(), Fe(0));
        assert!(matches!(
            xy.evaluate(&f5, &[Fe(1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sample_rejects_degree_zero() {
        let mut rng = RandomStream::new(1);
        assert!(sample_poly(&f(3), 2, 0, false, &mut rng).is_err());
        let p = sample_poly(&f(3), 3, 2, true, &mut rng).unwrap();
        assert_eq!(p.coeffs().len(), 6);
        assert!(!p.is_zero());
    }

    #[test]
    fn zero_locus_examples() {
        let f3 = f(3);
        let x = MultiPoly::from_terms(2, 1, &[(vec![1, 0], Fe(1))], &f3).unwrap();
        let locus = zero_locus_affine(&[x], &f3, 2).unwrap();
        assert_eq!(locus.len(), 3);
        assert!(locus.points().all(|p| p.0[0] == Fe(0)));

        let f5 = f(5);
        let x = MultiPoly::from_terms(2, 1, &[(vec![1, 0], Fe(1))], &f5).unwrap();
        let y = MultiPoly::from_terms(2, 1, &[(vec![0, 1], Fe(1))], &f5).unwrap();
        let locus = zero_locus_affine(&[x, y], &f5, 2).unwrap();
        assert_eq!(locus.indices(), &[0]);
    }

    #[test]
    fn zero_locus_respects_cap() {
        let f5 = f(5);
        let x = MultiPoly::from_terms(3, 1, &[(vec![1, 0, 0], Fe(1))], &f5).unwrap();
        assert!(matches!(
            zero_locus_affine_capped(&[x], &f5, 3, 100),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn dehomogenize_chart_zero() {
        let f5 = f(5);
        // x0^2 + x1 x2 on chart x0 = 1 is 1 + x y
        let mut h = MultiPoly::zero(3, 2, true);
        let i = h.index_of(&[2, 0, 0]).unwrap();
        h.coeffs[i] = Fe(1);
        let j = h.index_of(&[0, 1, 1]).unwrap();
        h.coeffs[j] = Fe(1);
        let a = h.dehomogenize(0).unwrap();
        assert_eq!(a.evaluate(&f5, &[Fe(2), Fe(2)]).unwrap(), Fe(0));
        assert_eq!(a.evaluate(&f5, &[Fe(1), Fe(1)]).unwrap(), Fe(2));
    }

    #[test]
    fn text_round_trip() {
        let f7 = f(7);
        let mut rng = RandomStream::new(5);
        let p = sample_poly(&f7, 3, 3, true, &mut rng).unwrap();
        let back = MultiPoly::parse_text(&p.to_text(), &f7).unwrap();
        assert_eq!(p, back);
    }
}
