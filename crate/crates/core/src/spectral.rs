//! Second eigenvalue of regular graphs and second singular value of
//! biregular bipartite graphs.
//!
//! The iterative path is a Lanczos process with full reorthogonalization on
//! the orthogonal complement of the known top eigenvector (the constant
//! vector). Bipartite graphs are handled through the Gram operator `B^T B`
//! on the right part. The dense path is an eigen/singular-value
//! decomposition used as a test oracle and for small graphs.

use std::cell::RefCell;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{start_vector_seed, AnyGraph, Biregular, SchreierGraph};
use crate::seed::rng_from_seed;

pub const DEFAULT_TOL: f64 = 1e-8;

/// Largest vertex count accepted by the dense oracle by default.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Stored Krylov basis is capped at roughly this many `f64`s.
const KRYLOV_MEMORY_BUDGET: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Iterative,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub lambda1: f64,
    pub lambda2_abs: f64,
    pub normalized: f64,
    pub unit: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdKind {
    Regular { degree: usize },
    Bipartite { left: usize, right: usize },
}

/// `2 sqrt(d - 1)` or `sqrt(d_L - 1) + sqrt(d_R - 1)`.
pub fn threshold_unit(kind: ThresholdKind) -> Result<f64> {
    match kind {
        ThresholdKind::Regular { degree } if degree >= 2 => {
            Ok(2.0 * ((degree - 1) as f64).sqrt())
        }
        ThresholdKind::Bipartite { left, right } if left >= 2 && right >= 2 => {
            Ok(((left - 1) as f64).sqrt() + ((right - 1) as f64).sqrt())
        }
        _ => Err(Error::params(format!(
            "threshold needs degrees >= 2, got {kind:?}"
        ))),
    }
}

/// Threshold for a graph, NaN when a degree is below 2.
fn unit_for(kind: ThresholdKind) -> f64 {
    threshold_unit(kind).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Absolute residual `||A y - theta y||` required of the reported pair.
    pub tol: f64,
    /// Krylov dimension per restart cycle.
    pub max_krylov: usize,
    /// Restart cap; `None` means `50 ceil(log2 n)`.
    pub max_restarts: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_krylov: 250,
            max_restarts: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::params(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_krylov < 2 {
            return Err(Error::params("Krylov dimension must be at least 2"));
        }
        Ok(())
    }
}

pub fn second_eigenvalue_regular(
    graph: &SchreierGraph,
    opts: &SolverOptions,
) -> Result<SpectrumResult> {
    opts.validate()?;
    let n = graph.n();
    let degree = graph.degree() as f64;
    let op = graph.adjacency_operator();
    let ends = lanczos(
        n,
        |x, y| op.apply(x, y),
        start_vector(n, graph.seed()),
        Target::BothEnds,
        opts,
    )?;
    let (value, residual) = if ends.low.0.abs() > ends.high.0.abs() {
        (ends.low.0.abs(), ends.low.1.max(ends.high.1))
    } else {
        (ends.high.0.abs(), ends.low.1.max(ends.high.1))
    };
    let unit = unit_for(ThresholdKind::Regular {
        degree: graph.degree(),
    });
    Ok(SpectrumResult {
        lambda1: degree,
        lambda2_abs: value,
        normalized: value / unit,
        unit,
        method: Method::Iterative,
        iterations: ends.iterations,
        residual,
    })
}

pub fn second_singular_bipartite<G: Biregular + ?Sized>(
    graph: &G,
    opts: &SolverOptions,
) -> Result<SpectrumResult> {
    opts.validate()?;
    let (nl, nr) = (graph.left_size(), graph.right_size());
    let op = graph.biadjacency_operator();
    let scratch = RefCell::new(vec![0.0; nl]);
    let lambda1 = ((graph.left_degree() * graph.right_degree()) as f64).sqrt();
    let ends = lanczos(
        nr,
        |x, y| {
            let mut tmp = scratch.borrow_mut();
            op.apply(x, &mut tmp);
            op.apply_transpose(&tmp, y);
        },
        start_vector(nr, graph.seed()),
        Target::Top,
        opts,
    )?;
    // A singular triplet residual is the Gram residual divided by sigma.
    let theta = ends.high.0.max(0.0);
    let sigma = theta.sqrt();
    let residual = ends.high.1 / sigma.max(1.0);
    let unit = unit_for(ThresholdKind::Bipartite {
        left: graph.left_degree(),
        right: graph.right_degree(),
    });
    Ok(SpectrumResult {
        lambda1,
        lambda2_abs: sigma,
        normalized: sigma / unit,
        unit,
        method: Method::Iterative,
        iterations: ends.iterations,
        residual,
    })
}

/// Iterative measurement of any graph kind.
pub fn measure(graph: &AnyGraph, opts: &SolverOptions) -> Result<SpectrumResult> {
    match graph {
        AnyGraph::Regular(g) => second_eigenvalue_regular(g, opts),
        AnyGraph::Bipartite(g) => second_singular_bipartite(g, opts),
        AnyGraph::Merged(g) => second_singular_bipartite(g, opts),
    }
}

fn start_vector(n: usize, graph_seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(start_vector_seed(graph_seed));
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn check_dense_cap(vertices: usize, cap: usize) -> Result<()> {
    if vertices > cap {
        return Err(Error::ResourceCap(format!(
            "dense spectrum needs {vertices} vertices, cap is {cap}"
        )));
    }
    Ok(())
}

/// All eigenvalues of a regular graph's adjacency, or all singular values
/// of a bipartite graph's biadjacency block, ascending.
pub fn dense_spectrum(graph: &AnyGraph, cap: usize) -> Result<Vec<f64>> {
    check_dense_cap(graph.vertex_count(), cap)?;
    let a = graph.materialize(usize::MAX)?.to_dense();
    let mut values: Vec<f64> = match graph {
        AnyGraph::Regular(_) => SymmetricEigen::new(a).eigenvalues.iter().copied().collect(),
        _ => a.singular_values().iter().copied().collect(),
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues of the symmetric `(n_L + n_R)` adjacency of a bipartite
/// graph, ascending.
pub fn dense_bipartite_symmetric_spectrum<G: Biregular + ?Sized>(
    graph: &G,
    cap: usize,
) -> Result<Vec<f64>> {
    check_dense_cap(graph.left_size() + graph.right_size(), cap)?;
    let a = graph.materialize_symmetric(usize::MAX)?.to_dense();
    let mut values: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Dense counterpart of [`measure`]. The second value is the spectral norm
/// of the operator compressed to the complement of the constant vector,
/// computed from `P A P` (regular) or `B P` (bipartite) with `P = I - J / n`.
pub fn dense_second_value(graph: &AnyGraph, cap: usize) -> Result<SpectrumResult> {
    check_dense_cap(graph.vertex_count(), cap)?;
    let a = graph.materialize(usize::MAX)?.to_dense();
    let (lambda1, lambda2, kind) = match graph {
        AnyGraph::Regular(g) => {
            let n = a.nrows();
            let p = centering(n);
            let lambda1 = SymmetricEigen::new(a.clone())
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let compressed = &p * a * &p;
            let lambda2 = SymmetricEigen::new(compressed)
                .eigenvalues
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.abs()));
            (
                lambda1,
                lambda2,
                ThresholdKind::Regular {
                    degree: g.degree(),
                },
            )
        }
        _ => {
            let (dl, dr) = graph.degrees();
            let lambda1 = a.singular_values().max();
            let p = centering(a.ncols());
            let lambda2 = (a * p).singular_values().max();
            (lambda1, lambda2, ThresholdKind::Bipartite { left: dl, right: dr })
        }
    };
    let unit = unit_for(kind);
    Ok(SpectrumResult {
        lambda1,
        lambda2_abs: lambda2,
        normalized: lambda2 / unit,
        unit,
        method: Method::Dense,
        iterations: 0,
        residual: 0.0,
    })
}

fn centering(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::from_element(n, n, -1.0 / n as f64);
    for i in 0..n {
        p[(i, i)] += 1.0;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    /// Smallest and largest eigenvalue (largest magnitude is read off both).
    BothEnds,
    /// Largest eigenvalue only (positive semidefinite operators).
    Top,
}

#[derive(Debug, Clone, Copy)]
struct Ends {
    low: (f64, f64),
    high: (f64, f64),
    iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the component along the constant vector.
fn deflate(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

struct Ritz {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Ritz {
    let j = alpha.len();
    let mut t = DMatrix::zeros(j, j);
    for i in 0..j {
        t[(i, i)] = alpha[i];
        if i + 1 < j {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    Ritz {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    }
}

/// Lanczos on the complement of the constant vector.
///
/// Each cycle builds up to `max_krylov` orthonormal vectors with full
/// reorthogonalization (two Gram-Schmidt passes). Convergence is tested on
/// the explicit residual of the Ritz vectors at the targeted end(s). A cycle
/// that ends unconverged restarts from the sum of those Ritz vectors.
fn lanczos<F>(
    n: usize,
    op: F,
    start: Vec<f64>,
    target: Target,
    opts: &SolverOptions,
) -> Result<Ends>
where
    F: Fn(&[f64], &mut [f64]),
{
    if n < 2 {
        return Err(Error::params("operator needs at least two vertices"));
    }
    let n_eff = n - 1;
    let memory_cap = (KRYLOV_MEMORY_BUDGET / n).max(8);
    let dim = opts.max_krylov.min(n_eff).min(memory_cap);
    let log2n = (usize::BITS - (n - 1).leading_zeros()) as usize;
    let max_restarts = opts.max_restarts.unwrap_or(50 * log2n.max(1));

    let mut v0 = start;
    let mut iterations = 0usize;
    let mut best = Ends {
        low: (f64::NAN, f64::INFINITY),
        high: (f64::NAN, f64::INFINITY),
        iterations: 0,
    };
    let mut w = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut ay = vec![0.0; n];

    for _cycle in 0..=max_restarts {
        deflate(&mut v0);
        let mut nv = norm(&v0);
        if nv == 0.0 || !nv.is_finite() {
            // Degenerate start: fall back to a fixed non-constant vector.
            v0 = (0..n).map(|i| (i as f64 + 1.0).sin()).collect();
            deflate(&mut v0);
            nv = norm(&v0);
        }
        v0.iter_mut().for_each(|x| *x /= nv);

        let mut basis: Vec<Vec<f64>> = vec![v0.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut scale = 0.0f64;
        let mut ritz = None;

        for j in 0..dim {
            op(&basis[j], &mut w);
            iterations += 1;
            deflate(&mut w);
            let a = dot(&w, &basis[j]);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    axpy(-c, v, &mut w);
                }
                deflate(&mut w);
            }
            let b = norm(&w);
            alpha.push(a);
            scale = scale.max(a.abs() + b);
            let exhausted = b <= 1e-12 * scale.max(1.0) || j + 1 == dim;
            let check = exhausted || (j + 1) % if j < 100 { 10 } else { 20 } == 0;
            if check {
                let r = tridiagonal_eigen(&alpha, &beta);
                let ends = ritz_ends(&r, target);
                let estimates_ok = ends
                    .iter()
                    .all(|&i| (b * r.vectors[(j, i)]).abs() <= opts.tol);
                if estimates_ok || exhausted {
                    let mut result = [(f64::NAN, f64::INFINITY); 2];
                    for (slot, &i) in ends.iter().enumerate() {
                        ritz_vector(&basis, &r.vectors, i, &mut y);
                        op(&y, &mut ay);
                        iterations += 1;
                        deflate(&mut ay);
                        let theta = r.values[i];
                        let res = ay
                            .iter()
                            .zip(&y)
                            .map(|(p, q)| (p - theta * q).powi(2))
                            .sum::<f64>()
                            .sqrt();
                        result[slot] = (theta, res);
                    }
                    let (low, high) = match target {
                        Target::BothEnds => (result[0], result[1]),
                        Target::Top => (result[0], result[0]),
                    };
                    best = Ends {
                        low,
                        high,
                        iterations,
                    };
                    if low.1 <= opts.tol && high.1 <= opts.tol {
                        return Ok(best);
                    }
                }
                ritz = Some(r);
                if exhausted {
                    break;
                }
            }
            beta.push(b);
            let next: Vec<f64> = w.iter().map(|x| x / b).collect();
            basis.push(next);
        }

        // Restart from the Ritz vector(s) at the targeted end(s).
        let r = ritz.unwrap_or_else(|| tridiagonal_eigen(&alpha, &beta));
        let mut next = vec![0.0; n];
        for &i in &ritz_ends(&r, target) {
            ritz_vector(&basis, &r.vectors, i, &mut y);
            axpy(1.0, &y, &mut next);
        }
        v0 = next;
    }

    let (estimate, residual) = match target {
        Target::BothEnds if best.low.0.abs() > best.high.0.abs() => (best.low.0.abs(), best.low.1),
        _ => (best.high.0.abs(), best.high.1.max(best.low.1)),
    };
    Err(Error::NonConvergence {
        estimate,
        residual,
        iterations,
    })
}

fn ritz_ends(r: &Ritz, target: Target) -> Vec<usize> {
    let mut lo = 0;
    let mut hi = 0;
    for (i, v) in r.values.iter().enumerate() {
        if *v < r.values[lo] {
            lo = i;
        }
        if *v > r.values[hi] {
            hi = i;
        }
    }
    match target {
        Target::BothEnds => vec![lo, hi],
        Target::Top => vec![hi],
    }
}

fn ritz_vector(basis: &[Vec<f64>], s: &DMatrix<f64>, col: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (k, v) in basis.iter().enumerate().take(s.nrows()) {
        axpy(s[(k, col)], v, out);
    }
    let nv = norm(out);
    if nv > 0.0 {
        out.iter_mut().for_each(|x| *x /= nv);
    }
}
