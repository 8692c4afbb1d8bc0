//! Arithmetic in F_q for prime powers q = p^e ≤ 2^31.
//!
//! Elements are encoded as integers in `[0, q)`: the base-p digits of the
//! encoding are the coefficients (lowest degree first) of the residue
//! polynomial modulo the field's monic irreducible modulus. For `e = 1` the
//! encoding is the residue itself.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 31;

/// Orders up to this size get log/antilog tables when `e > 1`.
const LOG_TABLE_LIMIT: u32 = 1 << 22;
/// Orders up to this size get an inverse table.
const INV_TABLE_LIMIT: u32 = 1 << 16;

/// A field element in canonical encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, coefficients lowest degree first, length `e + 1`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    inv: Vec<u32>,
}

/// Arithmetic context for F_q. Cheap to clone.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}^{}(modulus {})",
            self.p(),
            self.e(),
            self.modulus_encoding()
        )
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- polynomials over F_p as coefficient vectors (lowest degree first) ----

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    pow_mod(a as u64, p as u64 - 2, p as u64) as u32
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Remainder of `a` modulo `b` over F_p. `b` must be nonzero.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p) as u64;
    let p64 = p as u64;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = r[r.len() - 1] as u64 * lead_inv % p64;
        for (i, &bc) in b.iter().enumerate() {
            let idx = shift + i;
            let sub = factor * bc as u64 % p64;
            r[idx] = ((r[idx] as u64 + p64 - sub) % p64) as u32;
        }
        trim(&mut r);
    }
    r
}

/// Trial division against every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let mut f = poly.to_vec();
    trim(&mut f);
    if f.len() < 2 {
        return false;
    }
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits(mut x: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((x % p as u64) as u32);
        x /= p as u64;
    }
    out
}

fn from_digits(d: &[u32], p: u32) -> u64 {
    d.iter()
        .rev()
        .fold(0u64, |acc, &c| acc * p as u64 + c as u64)
}

impl FieldCtx {
    /// F_{p^e} with the lowest-encoding monic irreducible modulus.
    pub fn new(p: u64, e: u32) -> Result<Self> {
        Self::check_order(p, e)?;
        let p32 = p as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            let count = p.pow(e);
            let mut found = None;
            for low in 0..count {
                let mut m = digits(low, p32, e as usize);
                m.push(1);
                if is_irreducible(&m, p32) {
                    found = Some(m);
                    break;
                }
            }
            found.expect("an irreducible polynomial of every degree exists")
        };
        Ok(Self::build(p32, e, modulus))
    }

    /// F_{p^e} with an explicit modulus given by its encoding
    /// (`Σ c_i p^i`, including the leading `p^e` term).
    pub fn with_modulus(p: u64, e: u32, modulus_encoding: u64) -> Result<Self> {
        Self::check_order(p, e)?;
        let p32 = p as u32;
        let m = digits(modulus_encoding, p32, e as usize + 1);
        if from_digits(&m, p32) != modulus_encoding || m[e as usize] != 1 {
            return Err(Error::InvalidParams(format!(
                "modulus encoding {modulus_encoding} is not a monic polynomial of degree {e}"
            )));
        }
        if e > 1 && !is_irreducible(&m, p32) {
            return Err(Error::InvalidParams(format!(
                "modulus encoding {modulus_encoding} is reducible over F_{p}"
            )));
        }
        Ok(Self::build(p32, e, m))
    }

    /// Field of order `q`, which must be a prime power.
    pub fn from_order(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::NotPrime(q));
        }
        let p = prime_factors(q)[0];
        let mut e = 0u32;
        let mut x = q;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        if x != 1 {
            return Err(Error::InvalidParams(format!("{q} is not a prime power")));
        }
        Self::new(p, e)
    }

    fn check_order(p: u64, e: u32) -> Result<()> {
        if e == 0 {
            return Err(Error::InvalidParams(
                "extension degree must be at least 1".into(),
            ));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        match p.checked_pow(e) {
            Some(q) if q <= MAX_ORDER => Ok(()),
            _ => Err(Error::Overflow { p, e }),
        }
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(e);
        let mut inner = Inner {
            p,
            e,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            inv: Vec::new(),
        };
        if e > 1 && q <= LOG_TABLE_LIMIT {
            let (exp, log) = log_tables(&inner);
            inner.exp = exp;
            inner.log = log;
        }
        let mut ctx = FieldCtx(Arc::new(inner));
        if q <= INV_TABLE_LIMIT {
            let mut inv = vec![0u32; q as usize];
            for a in 1..q {
                inv[a as usize] = ctx.pow(Fe(a), q as u64 - 2).0;
            }
            Arc::get_mut(&mut ctx.0).expect("unique").inv = inv;
        }
        ctx
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn modulus_encoding(&self) -> u64 {
        from_digits(&self.0.modulus, self.0.p)
    }

    /// Serialized form `p e modulus_encoding`.
    pub fn to_text(&self) -> String {
        format!("{} {} {}", self.p(), self.e(), self.modulus_encoding())
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let parts: Vec<u64> = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("{t}: {e}")))
            })
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [p, e, m] => Self::with_modulus(*p, *e as u32, *m),
            _ => Err(Error::Parse(format!("expected `p e modulus`, got `{s}`"))),
        }
    }

    /// The order spelled `p^e`, as used in point-set headers.
    pub fn order_spelling(&self) -> String {
        format!("{}^{}", self.p(), self.e())
    }

    pub fn elem(&self, x: u32) -> Fe {
        debug_assert!(x < self.q());
        Fe(x)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, x: i64) -> Fe {
        Fe(x.rem_euclid(self.p() as i64) as u32)
    }

    /// All `q` elements in encoding order, starting with 0 and 1.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.q()).map(Fe)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.0;
        if inner.e == 1 {
            let s = a.0 as u64 + b.0 as u64;
            return Fe((s % inner.p as u64) as u32);
        }
        if inner.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let p = inner.p;
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        for _ in 0..inner.e {
            let d = (x % p + y % p) % p;
            out += d * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        Fe(out)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let inner = &*self.0;
        if a.0 == 0 {
            return a;
        }
        if inner.e == 1 {
            return Fe(inner.p - a.0);
        }
        if inner.p == 2 {
            return a;
        }
        let p = inner.p;
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        for _ in 0..inner.e {
            let d = x % p;
            out += ((p - d) % p) * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        Fe(out)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.0;
        if inner.e == 1 {
            return Fe((a.0 as u64 * b.0 as u64 % inner.p as u64) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        if !inner.exp.is_empty() {
            let n = inner.q as usize - 1;
            let s = inner.log[a.0 as usize] as usize + inner.log[b.0 as usize] as usize;
            return Fe(inner.exp[if s >= n { s - n } else { s }]);
        }
        Fe(mul_slow(inner, a.0, b.0))
    }

    pub fn pow(&self, a: Fe, mut k: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn checked_inv(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return None;
        }
        if !self.0.inv.is_empty() {
            return Some(Fe(self.0.inv[a.0 as usize]));
        }
        Some(self.pow(a, self.q() as u64 - 2))
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: Fe) -> Fe {
        self.checked_inv(a).expect("inverse of zero")
    }

    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }
}

/// Schoolbook product of the residue polynomials, reduced by the modulus.
fn mul_slow(inner: &Inner, a: u32, b: u32) -> u32 {
    let p = inner.p;
    let e = inner.e as usize;
    let da = digits(a as u64, p, e);
    let db = digits(b as u64, p, e);
    let mut prod = vec![0u64; 2 * e - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|x| x as u32).collect();
    let r = poly_rem(&prod, &inner.modulus, p);
    from_digits(&r, p) as u32
}

fn log_tables(inner: &Inner) -> (Vec<u32>, Vec<u32>) {
    let q = inner.q;
    let order = q as u64 - 1;
    let factors = prime_factors(order);
    let slow_pow = |g: u32, mut k: u64| {
        let (mut base, mut acc) = (g, 1u32);
        while k > 0 {
            if k & 1 == 1 {
                acc = mul_slow(inner, acc, base);
            }
            base = mul_slow(inner, base, base);
            k >>= 1;
        }
        acc
    };
    let generator = (2..q)
        .find(|&g| factors.iter().all(|&f| slow_pow(g, order / f) != 1))
        .expect("F_q^* is cyclic");
    let mut exp = vec![0u32; order as usize];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for (i, slot) in exp.iter_mut().enumerate() {
        *slot = x;
        log[x as usize] = i as u32;
        x = mul_slow(inner, x, generator);
    }
    (exp, log)
}
