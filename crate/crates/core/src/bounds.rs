//! Upper bounds on the expected second eigenvalue of the normalized
//! adjacency operator of random Schreier graphs of `GL_k(F_2)`.
//!
//! Here `d` is the number of random generators: the regular graph has
//! degree `2d`, the bipartite graph has degree `d` on both sides, and
//! `n = 2^k - 1`.
//!
//! The improved bounds are assembled as exact rationals; only the final
//! `2m`-th root is taken in floating point, from the exact value of the
//! expression under the root.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::census::{falling_factorial, CensusTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Prop1,
    Regular,
    Bipartite,
    Merged,
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop1" => Ok(BoundKind::Prop1),
            "regular" => Ok(BoundKind::Regular),
            "bipartite" => Ok(BoundKind::Bipartite),
            "merged" => Ok(BoundKind::Merged),
            other => Err(Error::params(format!(
                "unknown bound kind '{other}' (expected prop1, regular, bipartite or merged)"
            ))),
        }
    }
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Prop1 => "prop1",
            BoundKind::Regular => "regular",
            BoundKind::Bipartite => "bipartite",
            BoundKind::Merged => "merged",
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reading of the bipartite formula.
///
/// `AsPrinted` applies the `(1/d)^{2m}` factor both outside the bracket and
/// to the sum over `i` inside it. `SingleNormalization` applies it once,
/// outside, as in the regular formula. The latter is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BipartiteVariant {
    AsPrinted,
    #[default]
    SingleNormalization,
}

impl BipartiteVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            BipartiteVariant::AsPrinted => "as-printed",
            BipartiteVariant::SingleNormalization => "single-normalization",
        }
    }
}

impl std::str::FromStr for BipartiteVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" => Ok(BipartiteVariant::AsPrinted),
            "single-normalization" => Ok(BipartiteVariant::SingleNormalization),
            other => Err(Error::params(format!(
                "unknown variant '{other}' (expected as-printed or single-normalization)"
            ))),
        }
    }
}

/// Which improved bound `optimize_m` sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImprovedBound {
    Regular,
    Bipartite(BipartiteVariant),
}

impl ImprovedBound {
    pub fn label(&self) -> &'static str {
        match self {
            ImprovedBound::Regular => "regular",
            ImprovedBound::Bipartite(v) => v.as_str(),
        }
    }
}

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("nan")
    }
}

/// One step of the `m` sweep; `value` is `+inf` when the bound is vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint(pub usize, #[serde(serialize_with = "serialize_extended")] pub f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    /// Minimum over the sweep, `+inf` when every step was vacuous.
    #[serde(serialize_with = "serialize_extended")]
    pub value: f64,
    /// Argmin of the sweep, `0` when every step was vacuous.
    pub m_used: usize,
    pub trace: Vec<TracePoint>,
    pub variant: String,
}

/// The improved bounds are proved for the binary field only.
pub fn require_binary_field(q: u32) -> Result<()> {
    if q != 2 {
        return Err(Error::params(format!(
            "the improved bounds are defined for q = 2 only, got q = {q}"
        )));
    }
    Ok(())
}

/// `e sqrt(ln n / d)`.
pub fn bound_prop1(n: f64, d: usize) -> Result<f64> {
    if !(n >= 2.0) || d == 0 {
        return Err(Error::params(format!("need n >= 2 and d >= 1, got n = {n}, d = {d}")));
    }
    Ok(std::f64::consts::E * (n.ln() / d as f64).sqrt())
}

/// `n = 2^k - 1` as a float, for `bound_prop1`.
pub fn binary_vertex_count(k: usize) -> f64 {
    if k >= 1024 {
        f64::INFINITY
    } else {
        2f64.powi(k as i32) - 1.0
    }
}

/// Ramanujan ratio in the tables: `2 sqrt(2d - 1) / 2d` for the regular
/// graph of degree `2d`, `2 sqrt(d - 1) / d` for the bipartite graph.
pub fn ramanujan_ratio(kind: BoundKind, d: usize) -> f64 {
    match kind {
        BoundKind::Bipartite | BoundKind::Merged => 2.0 * ((d as f64) - 1.0).sqrt() / d as f64,
        BoundKind::Prop1 | BoundKind::Regular => {
            let deg = 2.0 * d as f64;
            2.0 * (deg - 1.0).sqrt() / deg
        }
    }
}

/// `sqrt(d1 d2) alpha` with `d2 = gamma d1`.
pub fn bound_merged(d1: usize, gamma: usize, alpha: f64) -> Result<f64> {
    if d1 == 0 || gamma == 0 || !(alpha >= 0.0) {
        return Err(Error::params(format!(
            "need d1 >= 1, gamma >= 1, alpha >= 0, got {d1}, {gamma}, {alpha}"
        )));
    }
    let d2 = gamma * d1;
    Ok(((d1 * d2) as f64).sqrt() * alpha)
}

fn check_kdm(k: usize, d: usize, m: usize) -> Result<()> {
    if k < 2 || d == 0 || m == 0 {
        return Err(Error::params(format!(
            "need k >= 2, d >= 1, m >= 1, got k = {k}, d = {d}, m = {m}"
        )));
    }
    Ok(())
}

fn int(v: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `R^{1/(2m)}` for an exact positive rational `R`, `None` if `R <= 0`.
fn root(r: &BigRational, m: usize) -> Option<f64> {
    if !r.is_positive() {
        return None;
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let ln = ln_biguint(num) - ln_biguint(den);
    Some((ln / (2 * m) as f64).exp())
}

/// Exact expression under the root of the regular bound.
pub fn regular_radicand(table: &mut CensusTable, k: usize, d: usize, m: usize) -> Result<BigRational> {
    check_kdm(k, d, m)?;
    if !table.signed() {
        return Err(Error::Internal("regular bound needs a signed census table".into()));
    }
    let n = (BigUint::one() << k) - 1u32;
    let nn = int(n.clone());
    let l = 2 * m;
    let frac = |num: u32| BigRational::new(BigInt::from(num), BigInt::from(n.clone()));
    let (one_n, two_n, five_n) = (frac(1), frac(2), frac(5));
    let mut bracket = BigRational::zero();
    for i in 1..=m.min(d) {
        let a = int(table.count(3, 1, l - 2 * i, d - i));
        let b = int(table.count(4, 0, l - 2 * i, d - i));
        let ab = &a + &b;
        let lead = int(table.binomial(d, i) * falling_factorial(l, 2 * i));
        let same_sign = int((BigUint::one() << i) - 1u32) * &ab * &two_n;
        let parenthesized = BigRational::new(
            BigInt::from(BigUint::one() << i),
            BigInt::from(falling_factorial(i + 1, i + 1)),
        );
        let opposite = &ab * &one_n + parenthesized * (&a * &five_n + &b);
        bracket += lead * (same_sign + opposite);
    }
    bracket += int(table.count(1, 1, l, d)) * &one_n;
    bracket += int(table.count(3, 1, l, d)) * &five_n;
    bracket += int(table.count(4, 0, l, d));
    let scale = int(BigUint::from(2 * d).pow(l as u32));
    Ok(nn * bracket / scale - BigRational::one())
}

/// Exact expression under the root of the bipartite bound.
pub fn bipartite_radicand(
    table: &mut CensusTable,
    k: usize,
    d: usize,
    m: usize,
    variant: BipartiteVariant,
) -> Result<BigRational> {
    check_kdm(k, d, m)?;
    if table.signed() {
        return Err(Error::Internal("bipartite bound needs an unsigned census table".into()));
    }
    let n = (BigUint::one() << k) - 1u32;
    let nn = int(n.clone());
    let l = 2 * m;
    let frac = |num: u32| BigRational::new(BigInt::from(num), BigInt::from(n.clone()));
    let (one_n, two_n, five_n) = (frac(1), frac(2), frac(5));
    let scale = int(BigUint::from(d).pow(l as u32));
    let mut sum = BigRational::zero();
    for i in 1..=m.min(d) {
        let a = int(table.count(3, 1, l - 2 * i, d - i));
        let b = int(table.count(4, 0, l - 2 * i, d - i));
        let halves = BigRational::new(BigInt::one(), BigInt::from(BigUint::one() << i));
        let parenthesized = BigRational::new(
            BigInt::from(BigUint::one() << i),
            BigInt::from(falling_factorial(i + 1, i + 1)),
        );
        let lead = int(table.binomial(d, i) * falling_factorial(l, 2 * i)) * halves * parenthesized;
        sum += lead * (a * &five_n + b);
    }
    if variant == BipartiteVariant::AsPrinted {
        sum /= &scale;
    }
    let mut bracket = sum;
    bracket += int(table.count(1, 1, l, d)) * &one_n;
    bracket += int(table.count(2, 1, l, d)) * &two_n;
    bracket += int(table.count(3, 1, l, d)) * &five_n;
    bracket += int(table.count(4, 0, l, d));
    Ok(nn * bracket / scale - BigRational::one())
}

/// Regular bound at a fixed `m`; `None` when vacuous.
pub fn bound_regular(k: usize, d: usize, m: usize) -> Result<Option<f64>> {
    let mut t = CensusTable::new(true);
    Ok(root(&regular_radicand(&mut t, k, d, m)?, m))
}

/// Bipartite bound at a fixed `m`; `None` when vacuous.
pub fn bound_bipartite(k: usize, d: usize, m: usize, variant: BipartiteVariant) -> Result<Option<f64>> {
    let mut t = CensusTable::new(false);
    Ok(root(&bipartite_radicand(&mut t, k, d, m, variant)?, m))
}

/// Sweep cap for `m`.
pub fn sweep_cap(k: usize) -> usize {
    (2 * k).max(200)
}

/// Sweeps `m = 1, 2, ..` and stops at the first `m` whose value exceeds the
/// previous one (vacuous steps count as `+inf`).
pub fn optimize_m(kind: ImprovedBound, k: usize, d: usize) -> Result<BoundResult> {
    check_kdm(k, d, 1)?;
    let mut table = CensusTable::new(matches!(kind, ImprovedBound::Regular));
    let mut trace = Vec::new();
    let mut prev: Option<f64> = None;
    for m in 1..=sweep_cap(k) {
        let r = match kind {
            ImprovedBound::Regular => regular_radicand(&mut table, k, d, m)?,
            ImprovedBound::Bipartite(v) => bipartite_radicand(&mut table, k, d, m, v)?,
        };
        let v = root(&r, m).unwrap_or(f64::INFINITY);
        trace.push(TracePoint(m, v));
        if prev.is_some_and(|p| v > p) {
            break;
        }
        prev = Some(v);
    }
    let (m_used, value) = trace
        .iter()
        .filter(|t| t.1.is_finite())
        .fold((0, f64::INFINITY), |best, t| if t.1 < best.1 { (t.0, t.1) } else { best });
    Ok(BoundResult {
        value,
        m_used,
        trace,
        variant: kind.label().to_string(),
    })
}
