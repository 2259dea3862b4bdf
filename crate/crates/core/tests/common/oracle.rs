//! Dense and brute-force reference computations that share no code with the
//! solvers under test. Graph structure is rebuilt from per-vertex generator
//! application, not from the cached action tables.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use schreier_core::graph::{AnyGraph, Biregular, GeneratorSet};

pub fn regular_adjacency(gens: &GeneratorSet) -> DMatrix<f64> {
    let n = gens.n();
    let mut a = DMatrix::zeros(n, n);
    for x in 0..n {
        for j in 0..gens.len() {
            a[(x, gens.apply(j, x).unwrap())] += 1.0;
            a[(x, gens.apply_inverse(j, x).unwrap())] += 1.0;
        }
    }
    a
}

/// Biadjacency with right vertex `s_j x / gamma`.
pub fn biadjacency(gens: &GeneratorSet, gamma: usize) -> DMatrix<f64> {
    let n = gens.n();
    let mut b = DMatrix::zeros(n, n / gamma);
    for x in 0..n {
        for j in 0..gens.len() {
            b[(x, gens.apply(j, x).unwrap() / gamma)] += 1.0;
        }
    }
    b
}

/// Largest |eigenvalue| of `A - (d/n) J`.
pub fn regular_second(gens: &GeneratorSet) -> f64 {
    let a = regular_adjacency(gens);
    let n = a.nrows();
    let d = 2.0 * gens.len() as f64;
    let deflated = a.map(|v| v - d / n as f64);
    SymmetricEigen::new(deflated)
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Largest singular value of `B - sigma_1 u v^T` with constant unit `u`, `v`.
pub fn bipartite_second(b: &DMatrix<f64>) -> f64 {
    let (nl, nr) = b.shape();
    let dl = b.row(0).sum();
    let dr = b.column(0).sum();
    let shift = (dl * dr).sqrt() / ((nl * nr) as f64).sqrt();
    let deflated = b.map(|v| v - shift);
    deflated
        .singular_values()
        .iter()
        .fold(0.0f64, |m, v| m.max(*v))
}

pub fn second_value(graph: &AnyGraph) -> f64 {
    match graph {
        AnyGraph::Regular(g) => regular_second(g.generators()),
        AnyGraph::Bipartite(g) => bipartite_second(&biadjacency(g.generators(), 1)),
        AnyGraph::Merged(g) => {
            assert!(g.shuffle_seed().is_none(), "oracle assumes block merging");
            bipartite_second(&biadjacency(g.base().generators(), g.gamma()))
        }
    }
}

/// Top singular value of a biregular graph's biadjacency.
pub fn bipartite_top<G: Biregular>(g: &G) -> f64 {
    let b = g.materialize(usize::MAX).unwrap().to_dense();
    b.singular_values().iter().fold(0.0f64, |m, v| m.max(*v))
}

/// Eigenvalues of `[[0, B], [B^T, 0]]`, ascending.
pub fn symmetric_form_spectrum(b: &DMatrix<f64>) -> Vec<f64> {
    let (nl, nr) = b.shape();
    let mut m = DMatrix::zeros(nl + nr, nl + nr);
    m.view_mut((0, nl), (nl, nr)).copy_from(b);
    m.view_mut((nl, 0), (nr, nl)).copy_from(&b.transpose());
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Free reduction of a word over letters `(index, inverse)`.
fn reduces_to_empty(word: &[(usize, bool)]) -> bool {
    let mut stack: Vec<(usize, bool)> = Vec::with_capacity(word.len());
    for &(j, inv) in word {
        match stack.last() {
            Some(&(k, kinv)) if k == j && kinv != inv => {
                stack.pop();
            }
            _ => stack.push((j, inv)),
        }
    }
    stack.is_empty()
}

/// Fraction of all `(2d)^{2m}` signed words that freely reduce to nothing.
pub fn collapse_by_enumeration(m: usize, d: usize) -> BigRational {
    let alphabet = 2 * d;
    let len = 2 * m;
    let total = alphabet.pow(len as u32);
    let mut hits = 0u64;
    let mut word = vec![(0usize, false); len];
    for mut w in 0..total {
        for slot in word.iter_mut() {
            let s = w % alphabet;
            w /= alphabet;
            *slot = (s / 2, s % 2 == 1);
        }
        hits += reduces_to_empty(&word) as u64;
    }
    BigRational::new(BigInt::from(hits), BigInt::from(total))
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Fraction of the `(2i)!` orders of `s_1, s_1^-1, .., s_i, s_i^-1` where
/// no two pairs interleave.
pub fn parenthesized_by_enumeration(i: usize) -> BigRational {
    let mut items: Vec<usize> = (0..2 * i).collect();
    let (mut good, mut total) = (0u64, 0u64);
    permutations(&mut items, 0, &mut |order| {
        total += 1;
        // literal `2j` and `2j + 1` form pair `j`
        let mut first = vec![usize::MAX; i];
        let mut span = vec![(0, 0); i];
        for (pos, &lit) in order.iter().enumerate() {
            let p = lit / 2;
            if first[p] == usize::MAX {
                first[p] = pos;
            } else {
                span[p] = (first[p], pos);
            }
        }
        let crossing = (0..i).any(|a| {
            (0..i).any(|b| span[a].0 < span[b].0 && span[b].0 < span[a].1 && span[a].1 < span[b].1)
        });
        good += (!crossing) as u64;
    });
    BigRational::new(BigInt::from(good), BigInt::from(total))
}
