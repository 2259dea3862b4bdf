//! Exact word counts for the trace method.
//!
//! A word of length `l` is a sequence over `d` letters, each written with a
//! sign (`s` or `s^-1`) in the signed setting or without one in the
//! unsigned setting. `count(p, c, l, d)` is the number of words of length
//! `l` in which at least `c` letters occur exactly `p` times and every other
//! letter that occurs at all occurs more than `p` times:
//!
//! ```text
//! N_p(c, l, d) = 1                                   if c = 0 and l = 0
//!              = 0                                   if p > l
//!              = sum_{i=c}^{l/p} C(d, i) w_p(l, i) N_{p+1}(0, l - p i, d - i)
//! ```
//!
//! with `w_p(l, i) = prod_{j<i} s^p C(l - j p, p)`, where `s = 2` for signed
//! words and `s = 1` for unsigned words. Everything is exact.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest word space `enumerate_census` will walk.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// Memoized census recursion for one alphabet kind.
#[derive(Debug, Clone)]
pub struct CensusTable {
    signed: bool,
    memo: HashMap<(u32, u32, u32, u32), BigUint>,
    pascal: Vec<Vec<BigUint>>,
}

impl CensusTable {
    pub fn new(signed: bool) -> Self {
        CensusTable {
            signed,
            memo: HashMap::new(),
            pascal: vec![vec![BigUint::one()]],
        }
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    /// Number of memoized keys.
    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn binomial(&mut self, n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        while self.pascal.len() <= n {
            let prev = self.pascal.last().unwrap();
            let mut row = Vec::with_capacity(prev.len() + 1);
            row.push(BigUint::one());
            for w in prev.windows(2) {
                row.push(&w[0] + &w[1]);
            }
            row.push(BigUint::one());
            self.pascal.push(row);
        }
        self.pascal[n][k].clone()
    }

    pub fn count(&mut self, p: usize, c: usize, l: usize, d: usize) -> BigUint {
        if c == 0 && l == 0 {
            return BigUint::one();
        }
        if p == 0 || p > l {
            return BigUint::zero();
        }
        let key = (p as u32, c as u32, l as u32, d as u32);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let sign_factor = if self.signed {
            BigUint::one() << p
        } else {
            BigUint::one()
        };
        let mut total = BigUint::zero();
        // choose = C(d, i), place = prod_{j<i} s^p C(l - j p, p).
        let mut choose = BigUint::one();
        let mut place = BigUint::one();
        for i in 0..=(l / p).min(d) {
            if i > 0 {
                choose = choose * BigUint::from(d - i + 1) / BigUint::from(i);
                place = place * &sign_factor * self.binomial(l - (i - 1) * p, p);
            }
            if i < c {
                continue;
            }
            let rest = self.count(p + 1, 0, l - p * i, d - i);
            if !rest.is_zero() {
                total += &choose * &place * rest;
            }
        }
        self.memo.insert(key, total.clone());
        total
    }
}

/// `X_p(c, l, d)`, signed alphabet.
pub fn count_x(p: usize, c: usize, l: usize, d: usize) -> BigUint {
    CensusTable::new(true).count(p, c, l, d)
}

/// `Y_p(c, l, d)`, unsigned alphabet.
pub fn count_y(p: usize, c: usize, l: usize, d: usize) -> BigUint {
    CensusTable::new(false).count(p, c, l, d)
}

/// `n! / (n - k)!`.
pub fn falling_factorial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    ((n - k + 1)..=n).fold(BigUint::one(), |acc, v| acc * BigUint::from(v))
}

/// Class sizes of all words of length `2m`.
///
/// Signed words: `x1` some letter once; `x2` no singleton and some letter
/// exactly twice with the same sign; `x2_prime` no singleton, some letter
/// exactly twice, every such letter with opposite signs; `x3` no letter once
/// or twice and some letter three times; `x4` every present letter at least
/// four times. Unsigned words use the same fields with `x2` meaning "some
/// letter exactly twice" and `x2_prime` absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCensus {
    pub m: usize,
    pub d: usize,
    pub signed: bool,
    pub x1: BigUint,
    pub x2: BigUint,
    pub x2_prime: Option<BigUint>,
    pub x3: BigUint,
    pub x4: BigUint,
}

impl WordCensus {
    pub fn total(&self) -> BigUint {
        let mut t = &self.x1 + &self.x2 + &self.x3 + &self.x4;
        if let Some(x) = &self.x2_prime {
            t += x;
        }
        t
    }

    /// `(2d)^{2m}` signed, `d^{2m}` unsigned.
    pub fn expected_total(&self) -> BigUint {
        let base = if self.signed { 2 * self.d } else { self.d };
        BigUint::from(base).pow(2 * self.m as u32)
    }
}

fn check_md(m: usize, d: usize) -> Result<()> {
    if m == 0 || d == 0 {
        return Err(Error::params(format!("census needs m >= 1 and d >= 1, got m = {m}, d = {d}")));
    }
    Ok(())
}

/// Class sizes from the recursion; `x2` and `x2_prime` from the closed sums
/// over the number `i` of letters that occur exactly twice.
pub fn census_sizes(m: usize, d: usize, signed: bool) -> Result<WordCensus> {
    check_md(m, d)?;
    let mut t = CensusTable::new(signed);
    let l = 2 * m;
    let x1 = t.count(1, 1, l, d);
    let x3 = t.count(3, 1, l, d);
    let x4 = t.count(4, 0, l, d);
    let (x2, x2_prime) = if signed {
        let mut same = BigUint::zero();
        let mut opposite = BigUint::zero();
        for i in 1..=m.min(d) {
            let base = t.binomial(d, i) * falling_factorial(l, 2 * i) * t.count(3, 0, l - 2 * i, d - i);
            same += &base * ((BigUint::one() << i) - 1u32);
            opposite += base;
        }
        (same, Some(opposite))
    } else {
        (t.count(2, 1, l, d), None)
    };
    Ok(WordCensus {
        m,
        d,
        signed,
        x1,
        x2,
        x2_prime,
        x3,
        x4,
    })
}

/// Classifies every word explicitly.
pub fn enumerate_census(m: usize, d: usize, signed: bool) -> Result<WordCensus> {
    check_md(m, d)?;
    let l = 2 * m;
    let alphabet = if signed { 2 * d } else { d } as u64;
    let words = alphabet
        .checked_pow(l as u32)
        .filter(|&w| w <= ENUMERATION_CAP)
        .ok_or_else(|| {
            Error::ResourceCap(format!(
                "enumeration of {alphabet}^{l} words exceeds {ENUMERATION_CAP}"
            ))
        })?;
    let mut sizes = [0u64; 5];
    let mut plus = vec![0u32; d];
    let mut minus = vec![0u32; d];
    for mut w in 0..words {
        plus.iter_mut().for_each(|c| *c = 0);
        minus.iter_mut().for_each(|c| *c = 0);
        for _ in 0..l {
            let symbol = (w % alphabet) as usize;
            w /= alphabet;
            if signed && symbol % 2 == 1 {
                minus[symbol / 2] += 1;
            } else if signed {
                plus[symbol / 2] += 1;
            } else {
                plus[symbol] += 1;
            }
        }
        let total = |j: usize| plus[j] + minus[j];
        let class = if (0..d).any(|j| total(j) == 1) {
            0
        } else if (0..d).any(|j| total(j) == 2) {
            let all_opposite = (0..d)
                .filter(|&j| total(j) == 2)
                .all(|j| plus[j] == 1 && minus[j] == 1);
            if signed && all_opposite {
                2
            } else {
                1
            }
        } else if (0..d).any(|j| total(j) == 3) {
            3
        } else {
            4
        };
        sizes[class] += 1;
    }
    Ok(WordCensus {
        m,
        d,
        signed,
        x1: sizes[0].into(),
        x2: sizes[1].into(),
        x2_prime: signed.then(|| sizes[2].into()),
        x3: sizes[3].into(),
        x4: sizes[4].into(),
    })
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Probability that a uniformly random signed word of length `2m` over `d`
/// letters reduces to the empty word under `x s s^-1 y -> x y`.
///
/// Counted as closed walks of length `2m` from the root of the
/// `2d`-regular tree (the Cayley graph of the free group).
pub fn collapse_probability(m: usize, d: usize) -> Result<BigRational> {
    check_md(m, d)?;
    let l = 2 * m;
    // walks[h] = walks ending at distance h from the root.
    let mut walks = vec![BigUint::zero(); l + 2];
    walks[0] = BigUint::one();
    for step in 0..l {
        let mut next = vec![BigUint::zero(); l + 2];
        for h in 0..=step.min(l) {
            if walks[h].is_zero() {
                continue;
            }
            if h == 0 {
                next[1] += &walks[0] * BigUint::from(2 * d);
            } else {
                next[h - 1] += &walks[h];
                next[h + 1] += &walks[h] * BigUint::from(2 * d - 1);
            }
        }
        walks = next;
    }
    Ok(ratio(walks[0].clone(), BigUint::from(2 * d).pow(l as u32)))
}

/// The closed form `C(2m+1, m) (2d)^m / ((2m+1) (2d)^{2m})`.
///
/// It counts pairs (non-crossing matching of the `2m` positions, letter for
/// each matched pair), so a word that reduces in several ways is counted
/// once per way. It equals [`collapse_probability`] for `m = 1` and is an
/// upper bound beyond that.
pub fn collapse_probability_closed_form(m: usize, d: usize) -> Result<BigRational> {
    check_md(m, d)?;
    let mut t = CensusTable::new(false);
    let catalan = t.binomial(2 * m + 1, m) / BigUint::from(2 * m + 1);
    let num = catalan * BigUint::from(2 * d).pow(m as u32);
    Ok(ratio(num, BigUint::from(2 * d).pow(2 * m as u32)))
}

/// `(2/d)^m`.
pub fn collapse_ceiling(m: usize, d: usize) -> Result<BigRational> {
    check_md(m, d)?;
    Ok(ratio(
        BigUint::from(2u32).pow(m as u32),
        BigUint::from(d).pow(m as u32),
    ))
}

/// Fraction `2^i / (i + 1)!` of arrangements of `s_1, s_1^-1, .., s_i, s_i^-1`
/// in which no two letter pairs interleave.
pub fn parenthesized_fraction(i: usize) -> Result<BigRational> {
    if i == 0 {
        return Err(Error::params("parenthesized fraction needs i >= 1"));
    }
    Ok(ratio(BigUint::one() << i, falling_factorial(i + 1, i + 1)))
}

/// Rational to `f64`, for display.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => a / b,
        _ => {
            let shift = n.bits().max(d.bits()).saturating_sub(60) as usize;
            let a = (n >> shift).to_f64().unwrap_or(0.0);
            let b = (d >> shift).to_f64().unwrap_or(f64::NAN);
            a / b
        }
    }
}
