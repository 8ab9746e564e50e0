//! Exact bivariate polynomials in `pq` and `pm`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct PolyParseError {
    pub line: usize,
    pub msg: String,
}

/// Sum of `c * pq^a * pm^b` with rational `c`. Zero coefficients are never
/// stored, so structural equality is polynomial equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<(u32, u32), BigRational>,
}

pub type BivariatePolynomial = Polynomial;

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn binomial_row(k: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 0..k {
        let next = &row[i as usize] * BigInt::from(k - i) / BigInt::from(i + 1);
        row.push(next);
    }
    row
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn monomial(c: BigRational, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn pq() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn pm() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    /// `(1 - pq)^k` when `in_pq`, else `(1 - pm)^k`, expanded.
    pub fn one_minus_pow(in_pq: bool, k: u32) -> Self {
        let mut p = Self::zero();
        for (i, c) in binomial_row(k).into_iter().enumerate() {
            let c = if i % 2 == 1 { -c } else { c };
            let (a, b) = if in_pq { (i as u32, 0) } else { (0, i as u32) };
            p.add_term(a, b, BigRational::from_integer(c));
        }
        p
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: u32, b: u32) -> BigRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in `(a + b, a)` order.
    pub fn terms(&self) -> Vec<((u32, u32), &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, c)).collect();
        v.sort_by_key(|((a, b), _)| (a + b, *a));
        v
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).min()
    }

    /// Terms of total degree at most `k`.
    pub fn truncate(&self, k: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a + b <= k)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a + b == d)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Coefficients of the univariate polynomial in `pm` obtained at `pq = 0`.
    pub fn at_pq_zero(&self) -> Vec<BigRational> {
        let deg = self.terms.keys().filter(|(a, _)| *a == 0).map(|(_, b)| *b).max();
        let Some(deg) = deg else { return Vec::new() };
        (0..=deg).map(|b| self.coeff(0, b)).collect()
    }

    /// Product keeping only terms of total degree at most `max`.
    pub fn mul_truncated(&self, other: &Self, max: Option<u32>) -> Self {
        let mut out = Self::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let (a, b) = (a1 + a2, b1 + b2);
                if max.is_some_and(|k| a + b > k) {
                    continue;
                }
                out.add_term(a, b, c1 * c2);
            }
        }
        out
    }

    pub fn pow_truncated(&self, e: u32, max: Option<u32>) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul_truncated(self, max);
        }
        acc
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Substitutes `pm -> q(pm)` where `q` is a polynomial in `pm` only.
    pub fn substitute_pm(&self, q: &Self, max: Option<u32>) -> Self {
        let top = self.terms.keys().map(|(_, b)| *b).max().unwrap_or(0);
        let mut powers = vec![Self::one()];
        for _ in 0..top {
            let next = powers.last().unwrap().mul_truncated(q, max);
            powers.push(next);
        }
        let mut out = Self::zero();
        for ((a, b), c) in &self.terms {
            let shifted = Self::monomial(c.clone(), *a, 0);
            out += shifted.mul_truncated(&powers[*b as usize], max);
        }
        out
    }

    pub fn evaluate_exact(&self, pq: &BigRational, pm: &BigRational) -> BigRational {
        let mut sum = BigRational::zero();
        for ((a, b), c) in &self.terms {
            sum += c * num_traits::pow(pq.clone(), *a as usize) * num_traits::pow(pm.clone(), *b as usize);
        }
        sum
    }

    pub fn evaluate(&self, pq: f64, pm: f64) -> f64 {
        // Exact accumulation avoids cancellation among large alternating terms.
        match (BigRational::from_float(pq), BigRational::from_float(pm)) {
            (Some(x), Some(y)) => self.evaluate_exact(&x, &y).to_f64().unwrap_or(f64::NAN),
            _ => f64::NAN,
        }
    }

    /// Fast floating-point evaluation for dense grids and root scans.
    pub fn evaluate_f64(&self, pq: f64, pm: f64) -> f64 {
        self.terms
            .iter()
            .map(|((a, b), c)| c.to_f64().unwrap_or(f64::NAN) * pq.powi(*a as i32) * pm.powi(*b as i32))
            .sum()
    }
}

fn parse_factor(tok: &str, var: &str) -> Option<u32> {
    let rest = tok.strip_prefix(var)?;
    if rest.is_empty() {
        return Some(1);
    }
    rest.strip_prefix('^')?.parse().ok()
}

fn parse_coeff(tok: &str) -> Option<BigRational> {
    match tok.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(tok.parse().ok()?)),
    }
}

impl FromStr for Polynomial {
    type Err = PolyParseError;

    /// One term per line: `<num>/<den> pq^a pm^b`. Integer coefficients,
    /// bare `pq`/`pm` and omitted factors are accepted; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Self::zero();
        for (i, raw) in s.lines().enumerate() {
            let err = |msg: &str| PolyParseError {
                line: i + 1,
                msg: msg.to_string(),
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let c = parse_coeff(toks.next().unwrap()).ok_or_else(|| err("bad coefficient"))?;
            let (mut a, mut b) = (None, None);
            for t in toks {
                if let Some(e) = parse_factor(t, "pq") {
                    if a.replace(e).is_some() {
                        return Err(err("repeated pq factor"));
                    }
                } else if let Some(e) = parse_factor(t, "pm") {
                    if b.replace(e).is_some() {
                        return Err(err("repeated pm factor"));
                    }
                } else {
                    return Err(err(&format!("unexpected token {t:?}")));
                }
            }
            p.add_term(a.unwrap_or(0), b.unwrap_or(0), c);
        }
        Ok(p)
    }
}

impl fmt::Display for Polynomial {
    /// Canonical text form; the zero polynomial prints nothing.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((a, b), c) in self.terms() {
            writeln!(f, "{}/{} pq^{a} pm^{b}", c.numer(), c.denom())?;
        }
        Ok(())
    }
}

impl Polynomial {
    /// Single-line human form such as `3 pq^2 + 9 pq pm - 1/2 pm^2`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, ((a, b), c)) in self.terms().into_iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            let mut parts = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                parts.push(mag.to_string());
            }
            for (v, e) in [("pq", a), ("pm", b)] {
                match e {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    _ => parts.push(format!("{v}^{e}")),
                }
            }
            out.push_str(&parts.join(" "));
        }
        out
    }
}

impl AddAssign for Polynomial {
    fn add_assign(&mut self, rhs: Self) {
        for ((a, b), c) in rhs.terms {
            self.add_term(a, b, c);
        }
    }
}

impl Add for Polynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Self) -> Polynomial {
        self.clone() + rhs.clone()
    }
}

impl Neg for Polynomial {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl Sub for Polynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Self) -> Polynomial {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Self) -> Polynomial {
        self.mul_truncated(rhs, None)
    }
}

impl Mul for Polynomial {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_truncated(&rhs, None)
    }
}
