//! Where two failure polynomials cross.
//!
//! Near the origin `A - B` is dominated by its lowest-degree homogeneous
//! part `H`. On the ray `pm = c pq`, `H = pq^d f(c)`, so the leading-order
//! crossover slopes are the positive roots of `f` at which it changes sign.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    fn of(x: f64) -> Option<Self> {
        if x > 0.0 {
            Some(Sign::Positive)
        } else if x < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "<",
            Sign::Positive => ">",
        }
    }
}

/// Critical ratio `pm / pq`.
#[derive(Debug, Clone, PartialEq)]
pub enum Slope {
    Rational(BigRational),
    /// `base + scale * sqrt(radicand)` with a square-free radicand.
    Surd {
        base: BigRational,
        scale: BigRational,
        radicand: BigInt,
    },
    /// Root of a higher-degree form, located numerically.
    Approx(f64),
}

impl Slope {
    pub fn to_f64(&self) -> f64 {
        match self {
            Slope::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Slope::Surd { base, scale, radicand } => {
                base.to_f64().unwrap_or(f64::NAN)
                    + scale.to_f64().unwrap_or(f64::NAN) * radicand.to_f64().unwrap_or(f64::NAN).sqrt()
            }
            Slope::Approx(x) => *x,
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Rational(r) => write!(f, "{r}"),
            Slope::Surd { base, scale, radicand } => {
                let op = if scale.is_negative() { '-' } else { '+' };
                write!(f, "{base} {op} {}*sqrt({radicand})", scale.abs())
            }
            Slope::Approx(x) => write!(f, "~{x:.12}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverPoint {
    pub slope: Slope,
    /// Sign of `A - B` for slightly smaller `pm / pq`.
    pub below: Sign,
    pub above: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Crossover {
    Identical,
    /// `A - B` keeps one sign on every ray near the origin.
    Dominance {
        degree: u32,
        sign: Sign,
    },
    Slopes {
        degree: u32,
        points: Vec<CrossoverPoint>,
    },
}

impl Crossover {
    pub fn slopes(&self) -> Vec<&Slope> {
        match self {
            Crossover::Slopes { points, .. } => points.iter().map(|p| &p.slope).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Crossover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Crossover::Identical => f.write_str("identical"),
            Crossover::Dominance { degree, sign } => {
                write!(
                    f,
                    "no crossover at order {degree}: A - B {} 0 on every ray",
                    sign.symbol()
                )
            }
            Crossover::Slopes { degree, points } => {
                let parts: Vec<String> = points
                    .iter()
                    .map(|p| {
                        format!(
                            "c = {} (A - B {} 0 below, {} 0 above)",
                            p.slope,
                            p.below.symbol(),
                            p.above.symbol()
                        )
                    })
                    .collect();
                write!(f, "{} [order {degree}]", parts.join("; "))
            }
        }
    }
}

/// Polynomial `f(c)` with rational coefficients, lowest power first.
fn ray_form(d: &Polynomial, degree: u32) -> Vec<BigRational> {
    (0..=degree).map(|i| d.coeff(degree - i, i)).collect()
}

fn eval(f: &[BigRational], c: f64) -> f64 {
    f.iter()
        .rev()
        .fold(0.0, |acc, k| acc * c + k.to_f64().unwrap_or(f64::NAN))
}

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Splits `n > 0` into `s^2 * r` with `r` free of small square factors.
fn square_free(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = BigInt::one();
    let mut r = n.clone();
    let mut k = BigInt::from(2);
    while &k * &k <= r && k < BigInt::from(100_000) {
        let kk = &k * &k;
        while (&r % &kk).is_zero() {
            r /= &kk;
            s *= &k;
        }
        k += 1;
    }
    if let Some(root) = is_square(&r) {
        s *= root;
        r = BigInt::one();
    }
    (s, r)
}

fn exact_roots(g: &[BigRational]) -> Option<Vec<Slope>> {
    match g.len() {
        1 => Some(Vec::new()),
        2 => Some(vec![Slope::Rational(-&g[0] / &g[1])]),
        3 => {
            let (c0, c1, c2) = (&g[0], &g[1], &g[2]);
            let disc = c1 * c1 - BigRational::from_integer(BigInt::from(4)) * c2 * c0;
            if disc.is_negative() {
                return Some(Vec::new());
            }
            let two_a = c2 * BigRational::from_integer(BigInt::from(2));
            let base = -c1 / &two_a;
            if disc.is_zero() {
                return Some(vec![Slope::Rational(base)]);
            }
            // sqrt(N/D) = sqrt(N D) / D.
            let (num, den) = (disc.numer().clone(), disc.denom().clone());
            let (s, r) = square_free(&(num * &den));
            let root_scale = BigRational::new(s, den);
            let mut out = Vec::new();
            for sign in [-1i64, 1] {
                let scale = &root_scale / &two_a * BigRational::from_integer(BigInt::from(sign));
                out.push(if r.is_one() {
                    Slope::Rational(&base + &scale)
                } else {
                    Slope::Surd {
                        base: base.clone(),
                        scale,
                        radicand: r.clone(),
                    }
                });
            }
            Some(out)
        }
        _ => None,
    }
}

fn numeric_roots(g: &[BigRational]) -> Vec<Slope> {
    let mut out = Vec::new();
    let steps = 4000;
    let at = |i: usize| 10f64.powf(-6.0 + 12.0 * i as f64 / steps as f64);
    let mut prev = (at(0), eval(g, at(0)));
    for i in 1..=steps {
        let c = at(i);
        let v = eval(g, c);
        if prev.1 == 0.0 || prev.1.signum() != v.signum() {
            let (mut lo, mut hi) = (prev.0, c);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if eval(g, mid).signum() == eval(g, lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(Slope::Approx(0.5 * (lo + hi)));
        }
        prev = (c, v);
    }
    out
}

/// Leading-order crossover of `a - b` on rays `pm = c pq`.
pub fn crossover(a: &Polynomial, b: &Polynomial) -> Crossover {
    let d = a - b;
    let Some(degree) = d.lowest_degree() else {
        return Crossover::Identical;
    };
    let mut g = ray_form(&d, degree);
    // Roots at c = 0 and c = infinity lie on the axes, not inside the quadrant.
    while g.first().is_some_and(|c| c.is_zero()) {
        g.remove(0);
    }
    while g.last().is_some_and(|c| c.is_zero()) {
        g.pop();
    }
    let mut roots: Vec<Slope> = exact_roots(&g)
        .unwrap_or_else(|| numeric_roots(&g))
        .into_iter()
        .filter(|r| r.to_f64() > 0.0)
        .collect();
    roots.sort_by(|x, y| x.to_f64().total_cmp(&y.to_f64()));
    roots.dedup_by(|x, y| x == y);
    let values: Vec<f64> = roots.iter().map(Slope::to_f64).collect();
    let probe = |i: usize| -> f64 {
        // Point strictly between root i-1 and root i.
        let lo = if i == 0 { 0.0 } else { values[i - 1] };
        match values.get(i) {
            Some(&hi) => 0.5 * (lo + hi),
            None => 2.0 * lo.max(1.0),
        }
    };
    let signs: Vec<Option<Sign>> = (0..=values.len()).map(|i| Sign::of(eval(&g, probe(i)))).collect();
    let points: Vec<CrossoverPoint> = roots
        .into_iter()
        .enumerate()
        .filter_map(|(i, slope)| match (signs[i], signs[i + 1]) {
            (Some(below), Some(above)) if below != above => Some(CrossoverPoint { slope, below, above }),
            _ => None,
        })
        .collect();
    if points.is_empty() {
        let sign = signs.iter().flatten().next().copied().unwrap_or(Sign::Positive);
        return Crossover::Dominance { degree, sign };
    }
    Crossover::Slopes { degree, points }
}

/// For each `pq`, the `pm` values in `(0, 1]` where the full `a - b` changes
/// sign, located by scanning and bisection.
pub fn crossover_curve(a: &Polynomial, b: &Polynomial, pq_values: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let d = a - b;
    let steps = 2000;
    pq_values
        .iter()
        .map(|&pq| {
            let f = |pm: f64| d.evaluate_f64(pq, pm);
            let mut roots = Vec::new();
            let mut prev = (1e-9, f(1e-9));
            for i in 1..=steps {
                let pm = i as f64 / steps as f64;
                let v = f(pm);
                if v != 0.0 && prev.1 != 0.0 && v.signum() != prev.1.signum() {
                    let (mut lo, mut hi) = (prev.0, pm);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if f(mid).signum() == f(lo).signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    roots.push(0.5 * (lo + hi));
                }
                prev = (pm, v);
            }
            (pq, roots)
        })
        .collect()
}
