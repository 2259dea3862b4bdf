//! Arithmetic over prime fields `F_q` and the invertible linear maps that
//! generate Schreier graphs.
//!
//! Vertices of every matrix-model graph are the nonzero vectors of `F_q^k`.
//! They are indexed little-endian in base `q`, minus one, so the index range
//! is exactly `[0, q^k - 2]`.
//!
//! For `q = 2` and `k <= 64` a vector is also a machine word (bit `j` is
//! coordinate `j`, and the word equals `index + 1`); the packed path
//! ([`PackedGf2Matrix`]) is bit-exact with the generic one.

use rand::Rng;

use crate::error::{Error, Result};

/// Rejection sampling gives up after this many singular draws.
pub const MAX_SAMPLING_ATTEMPTS: usize = 1000;

/// Largest `q^k` accepted, so every vertex index fits in a `u32`.
const MAX_SPACE_SIZE: u64 = 1 << 32;

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q % 2 == 0 {
        return false;
    }
    let mut f = 3;
    while f * f <= q {
        if q % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

#[inline]
fn mul_mod(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 * b as u64) % q as u64) as u32
}

#[inline]
fn sub_mod(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 + q as u64 - b as u64) % q as u64) as u32
}

fn pow_mod(mut base: u32, mut exp: u64, q: u32) -> u32 {
    let mut acc = 1 % q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of a nonzero residue (Fermat).
#[inline]
fn inv_mod(a: u32, q: u32) -> u32 {
    debug_assert!(a % q != 0);
    pow_mod(a, q as u64 - 2, q)
}

/// The field size `q` (prime) and vector dimension `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldParams {
    q: u32,
    k: usize,
}

impl FieldParams {
    pub fn new(q: u32, k: usize) -> Result<Self> {
        if !is_prime(q as u64) {
            return Err(Error::params(format!("q = {q} is not prime")));
        }
        if k < 2 {
            return Err(Error::params(format!("dimension k = {k} must be at least 2")));
        }
        let size = (q as u64)
            .checked_pow(k as u32)
            .filter(|&s| s <= MAX_SPACE_SIZE)
            .ok_or_else(|| Error::params(format!("q^k = {q}^{k} exceeds 2^32")))?;
        debug_assert!(size > 3);
        Ok(FieldParams { q, k })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of nonzero vectors, `q^k - 1`.
    pub fn vertex_count(&self) -> usize {
        (self.q as usize).pow(self.k as u32) - 1
    }

    fn packable(&self) -> bool {
        self.q == 2 && self.k <= 64
    }
}

/// A vector of `F_q^k`; every coordinate is reduced modulo `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldVector(Vec<u32>);

impl FieldVector {
    pub fn new(params: FieldParams, coords: &[u32]) -> Result<Self> {
        if coords.len() != params.k {
            return Err(Error::params(format!(
                "vector has {} coordinates, expected {}",
                coords.len(),
                params.k
            )));
        }
        Ok(FieldVector(coords.iter().map(|&c| c % params.q).collect()))
    }

    pub fn zero(params: FieldParams) -> Self {
        FieldVector(vec![0; params.k])
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn random<R: Rng + ?Sized>(params: FieldParams, rng: &mut R) -> Self {
        FieldVector((0..params.k).map(|_| rng.gen_range(0..params.q)).collect())
    }
}

/// Index of a nonzero vector: `sum_j coords[j] * q^j - 1`.
pub fn vertex_index(params: FieldParams, v: &FieldVector) -> Result<usize> {
    if v.0.len() != params.k {
        return Err(Error::params("vector dimension mismatch"));
    }
    if v.is_zero() {
        return Err(Error::VertexOutOfRange("the zero vector is not a vertex".into()));
    }
    Ok(encode(params.q, &v.0) - 1)
}

/// Inverse of [`vertex_index`].
pub fn index_vertex(params: FieldParams, index: usize) -> Result<FieldVector> {
    if index >= params.vertex_count() {
        return Err(Error::VertexOutOfRange(format!(
            "index {index} not in [0, {}]",
            params.vertex_count() - 1
        )));
    }
    let mut coords = vec![0; params.k];
    decode(params.q, index + 1, &mut coords);
    Ok(FieldVector(coords))
}

#[inline]
fn encode(q: u32, coords: &[u32]) -> usize {
    coords
        .iter()
        .rev()
        .fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

#[inline]
fn decode(q: u32, mut value: usize, out: &mut [u32]) {
    for c in out.iter_mut() {
        *c = (value % q as usize) as u32;
        value /= q as usize;
    }
}

/// Common behaviour of dense and Toeplitz generators.
pub trait LinearMap {
    fn params(&self) -> FieldParams;

    fn to_matrix(&self) -> FieldMatrix;

    fn mat_vec(&self, v: &FieldVector) -> FieldVector;

    fn determinant(&self) -> u32 {
        self.to_matrix().determinant()
    }

    fn is_invertible(&self) -> bool {
        self.determinant() != 0
    }
}

/// A `k x k` matrix over `F_q`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    params: FieldParams,
    entries: Vec<u32>,
}

impl FieldMatrix {
    pub fn new(params: FieldParams, entries: &[u32]) -> Result<Self> {
        let k = params.k;
        if entries.len() != k * k {
            return Err(Error::params(format!(
                "matrix has {} entries, expected {}",
                entries.len(),
                k * k
            )));
        }
        Ok(FieldMatrix {
            params,
            entries: entries.iter().map(|&e| e % params.q).collect(),
        })
    }

    pub fn identity(params: FieldParams) -> Self {
        let k = params.k;
        let mut entries = vec![0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1;
        }
        FieldMatrix { params, entries }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.params.k + col]
    }

    pub fn mul(&self, rhs: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.params, rhs.params, "matrix parameters differ");
        let (k, q) = (self.params.k, self.params.q as u64);
        let mut entries = vec![0; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0u64;
                for t in 0..k {
                    acc = (acc + self.entry(i, t) as u64 * rhs.entry(t, j) as u64) % q;
                }
                entries[i * k + j] = acc as u32;
            }
        }
        FieldMatrix {
            params: self.params,
            entries,
        }
    }

    /// Determinant by Gaussian elimination over `F_q`.
    pub fn determinant(&self) -> u32 {
        let (k, q) = (self.params.k, self.params.q);
        let mut a = self.entries.clone();
        let mut det = 1u32;
        for col in 0..k {
            let Some(pivot) = (col..k).find(|&r| a[r * k + col] != 0) else {
                return 0;
            };
            if pivot != col {
                for j in 0..k {
                    a.swap(pivot * k + j, col * k + j);
                }
                det = sub_mod(0, det, q);
            }
            let p = a[col * k + col];
            det = mul_mod(det, p, q);
            let p_inv = inv_mod(p, q);
            for r in col + 1..k {
                let factor = mul_mod(a[r * k + col], p_inv, q);
                if factor == 0 {
                    continue;
                }
                for j in col..k {
                    let sub = mul_mod(factor, a[col * k + j], q);
                    a[r * k + j] = sub_mod(a[r * k + j], sub, q);
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; fails on singular input.
    pub fn invert(&self) -> Result<FieldMatrix> {
        let (k, q) = (self.params.k, self.params.q);
        let w = 2 * k;
        let mut a = vec![0u32; k * w];
        for i in 0..k {
            a[i * w..i * w + k].copy_from_slice(&self.entries[i * k..(i + 1) * k]);
            a[i * w + k + i] = 1;
        }
        for col in 0..k {
            let pivot = (col..k)
                .find(|&r| a[r * w + col] != 0)
                .ok_or(Error::Singular)?;
            if pivot != col {
                for j in 0..w {
                    a.swap(pivot * w + j, col * w + j);
                }
            }
            let p_inv = inv_mod(a[col * w + col], q);
            for j in 0..w {
                a[col * w + j] = mul_mod(a[col * w + j], p_inv, q);
            }
            for r in 0..k {
                if r == col {
                    continue;
                }
                let factor = a[r * w + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..w {
                    let sub = mul_mod(factor, a[col * w + j], q);
                    a[r * w + j] = sub_mod(a[r * w + j], sub, q);
                }
            }
        }
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            entries.extend_from_slice(&a[i * w + k..(i + 1) * w]);
        }
        Ok(FieldMatrix {
            params: self.params,
            entries,
        })
    }

    fn mat_vec_into(&self, x: &[u32], out: &mut [u32]) {
        let (k, q) = (self.params.k, self.params.q as u64);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * k..(i + 1) * k];
            let acc = row
                .iter()
                .zip(x)
                .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % q);
            *o = acc as u32;
        }
    }

    /// Packed form for `q = 2`, `k <= 64`.
    pub fn packed(&self) -> Option<PackedGf2Matrix> {
        if !self.params.packable() {
            return None;
        }
        let k = self.params.k;
        let cols = (0..k)
            .map(|j| {
                (0..k).fold(0u64, |acc, i| acc | ((self.entry(i, j) as u64) << i))
            })
            .collect();
        Some(PackedGf2Matrix { cols })
    }
}

impl LinearMap for FieldMatrix {
    fn params(&self) -> FieldParams {
        self.params
    }

    fn to_matrix(&self) -> FieldMatrix {
        self.clone()
    }

    fn mat_vec(&self, v: &FieldVector) -> FieldVector {
        assert_eq!(v.0.len(), self.params.k, "dimension mismatch");
        let mut out = vec![0; self.params.k];
        self.mat_vec_into(&v.0, &mut out);
        FieldVector(out)
    }

    fn determinant(&self) -> u32 {
        FieldMatrix::determinant(self)
    }
}

/// A Toeplitz matrix stored by its `2k - 1` diagonals:
/// entry `(i, j)` is `diagonals[j - i + k - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ToeplitzGenerator {
    params: FieldParams,
    diagonals: Vec<u32>,
}

impl ToeplitzGenerator {
    pub fn new(params: FieldParams, diagonals: &[u32]) -> Result<Self> {
        let expected = 2 * params.k - 1;
        if diagonals.len() != expected {
            return Err(Error::params(format!(
                "Toeplitz generator has {} diagonals, expected {expected}",
                diagonals.len()
            )));
        }
        Ok(ToeplitzGenerator {
            params,
            diagonals: diagonals.iter().map(|&e| e % params.q).collect(),
        })
    }

    pub fn diagonals(&self) -> &[u32] {
        &self.diagonals
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.diagonals[col + self.params.k - 1 - row]
    }

    // y_i = sum_j t[j - i + k - 1] x_j: a sliding window over the diagonals.
    fn mat_vec_into(&self, x: &[u32], out: &mut [u32]) {
        let (k, q) = (self.params.k, self.params.q as u64);
        for (i, o) in out.iter_mut().enumerate() {
            let window = &self.diagonals[k - 1 - i..2 * k - 1 - i];
            let acc = window
                .iter()
                .zip(x)
                .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % q);
            *o = acc as u32;
        }
    }
}

impl LinearMap for ToeplitzGenerator {
    fn params(&self) -> FieldParams {
        self.params
    }

    fn to_matrix(&self) -> FieldMatrix {
        let k = self.params.k;
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                entries.push(self.entry(i, j));
            }
        }
        FieldMatrix {
            params: self.params,
            entries,
        }
    }

    fn mat_vec(&self, v: &FieldVector) -> FieldVector {
        assert_eq!(v.0.len(), self.params.k, "dimension mismatch");
        let mut out = vec![0; self.params.k];
        self.mat_vec_into(&v.0, &mut out);
        FieldVector(out)
    }
}

/// A GF(2) matrix stored column-wise as bit masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedGf2Matrix {
    cols: Vec<u64>,
}

impl PackedGf2Matrix {
    #[inline]
    pub fn apply(&self, mut bits: u64) -> u64 {
        let mut out = 0;
        let mut j = 0;
        while bits != 0 {
            if bits & 1 == 1 {
                out ^= self.cols[j];
            }
            bits >>= 1;
            j += 1;
        }
        out
    }
}

/// Maps vertex indices through a linear map, reusing scratch buffers.
pub(crate) struct IndexMapper<'a> {
    params: FieldParams,
    kind: MapperKind<'a>,
    x: Vec<u32>,
    y: Vec<u32>,
}

enum MapperKind<'a> {
    Packed(PackedGf2Matrix),
    Dense(&'a FieldMatrix),
    Toeplitz(&'a ToeplitzGenerator),
}

impl<'a> IndexMapper<'a> {
    pub(crate) fn dense(m: &'a FieldMatrix) -> Self {
        let kind = match m.packed() {
            Some(p) => MapperKind::Packed(p),
            None => MapperKind::Dense(m),
        };
        Self::with_kind(m.params, kind)
    }

    pub(crate) fn toeplitz(t: &'a ToeplitzGenerator) -> Self {
        let kind = match t.to_matrix().packed() {
            Some(p) => MapperKind::Packed(p),
            None => MapperKind::Toeplitz(t),
        };
        Self::with_kind(t.params, kind)
    }

    fn with_kind(params: FieldParams, kind: MapperKind<'a>) -> Self {
        IndexMapper {
            params,
            kind,
            x: vec![0; params.k],
            y: vec![0; params.k],
        }
    }

    #[inline]
    pub(crate) fn map(&mut self, index: usize) -> usize {
        let q = self.params.q;
        match &self.kind {
            MapperKind::Packed(p) => (p.apply(index as u64 + 1) - 1) as usize,
            MapperKind::Dense(m) => {
                decode(q, index + 1, &mut self.x);
                m.mat_vec_into(&self.x, &mut self.y);
                encode(q, &self.y) - 1
            }
            MapperKind::Toeplitz(t) => {
                decode(q, index + 1, &mut self.x);
                t.mat_vec_into(&self.x, &mut self.y);
                encode(q, &self.y) - 1
            }
        }
    }
}

/// A uniformly random (possibly singular) matrix; consumes `k^2` draws.
pub fn random_matrix<R: Rng + ?Sized>(params: FieldParams, rng: &mut R) -> FieldMatrix {
    let entries = (0..params.k * params.k)
        .map(|_| rng.gen_range(0..params.q))
        .collect();
    FieldMatrix { params, entries }
}

/// A uniformly random (possibly singular) Toeplitz matrix; consumes `2k - 1` draws.
pub fn random_toeplitz<R: Rng + ?Sized>(params: FieldParams, rng: &mut R) -> ToeplitzGenerator {
    let diagonals = (0..2 * params.k - 1)
        .map(|_| rng.gen_range(0..params.q))
        .collect();
    ToeplitzGenerator { params, diagonals }
}

/// Uniform element of `GL_k(F_q)` by rejection of singular draws.
pub fn random_invertible_matrix<R: Rng + ?Sized>(
    params: FieldParams,
    rng: &mut R,
) -> Result<FieldMatrix> {
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let m = random_matrix(params, rng);
        if m.determinant() != 0 {
            return Ok(m);
        }
    }
    Err(Error::Internal(format!(
        "no invertible matrix in {MAX_SAMPLING_ATTEMPTS} attempts"
    )))
}

/// Uniform invertible Toeplitz matrix by rejection of singular draws.
pub fn random_invertible_toeplitz<R: Rng + ?Sized>(
    params: FieldParams,
    rng: &mut R,
) -> Result<ToeplitzGenerator> {
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let t = random_toeplitz(params, rng);
        if t.determinant() != 0 {
            return Ok(t);
        }
    }
    Err(Error::Internal(format!(
        "no invertible Toeplitz matrix in {MAX_SAMPLING_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(q: u32, k: usize) -> FieldParams {
        FieldParams::new(q, k).unwrap()
    }

    // Laplace expansion along the first row; independent of elimination.
    fn cofactor_det(m: &[Vec<i64>], q: i64) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0].rem_euclid(q);
        }
        let mut acc = 0i64;
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            acc = (acc + sign * m[0][j] * cofactor_det(&minor, q)).rem_euclid(q);
        }
        acc
    }

    fn as_rows(m: &FieldMatrix) -> Vec<Vec<i64>> {
        let k = m.params().k();
        (0..k)
            .map(|i| (0..k).map(|j| m.entry(i, j) as i64).collect())
            .collect()
    }

    #[test]
    fn params_validation() {
        assert!(FieldParams::new(2, 1).is_err());
        assert!(FieldParams::new(4, 3).is_err());
        assert!(FieldParams::new(1, 3).is_err());
        assert!(FieldParams::new(2, 40).is_err());
        assert_eq!(p(2, 14).vertex_count(), 16383);
        assert_eq!(p(7, 5).vertex_count(), 16806);
        assert_eq!(p(2, 2).vertex_count(), 3);
    }

    #[test]
    fn identity_determinant_and_inverse() {
        for &(q, k) in &[(2, 2), (3, 4), (7, 5), (11, 3)] {
            let id = FieldMatrix::identity(p(q, k));
            assert_eq!(id.determinant(), 1);
            assert_eq!(id.invert().unwrap(), id);
        }
    }

    #[test]
    fn repeated_row_is_singular() {
        let m = FieldMatrix::new(p(5, 3), &[1, 2, 3, 4, 0, 1, 1, 2, 3]).unwrap();
        assert_eq!(m.determinant(), 0);
        assert_eq!(m.invert(), Err(Error::Singular));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(q, k) in &[(5, 4), (2, 5), (3, 5), (7, 2), (13, 3)] {
            for _ in 0..50 {
                let m = random_matrix(p(q, k), &mut rng);
                assert_eq!(
                    m.determinant() as i64,
                    cofactor_det(&as_rows(&m), q as i64),
                    "{m:?}"
                );
            }
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(q, k) in &[(2, 6), (3, 4), (7, 5)] {
            let params = p(q, k);
            for _ in 0..20 {
                let m = random_invertible_matrix(params, &mut rng).unwrap();
                let inv = m.invert().unwrap();
                assert_eq!(inv.mul(&m), FieldMatrix::identity(params));
                assert_eq!(m.mul(&inv), FieldMatrix::identity(params));
                assert_eq!(inv.invert().unwrap(), m);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let params = p(2, 3);
        let a = random_invertible_matrix(params, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_invertible_matrix(params, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        let t1 = random_invertible_toeplitz(p(7, 5), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let t2 = random_invertible_toeplitz(p(7, 5), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn gf2_invertible_fraction_above_quarter() {
        let params = p(2, 14);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let accepted = (0..10_000)
            .filter(|_| random_matrix(params, &mut rng).determinant() != 0)
            .count();
        assert!(accepted as f64 / 10_000.0 > 0.25, "accepted {accepted}");
    }

    #[test]
    fn toeplitz_invertible_fraction_is_one_minus_one_over_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for &(q, k, lo, hi) in &[(2, 10, 0.47, 0.53), (7, 5, 0.84, 0.88)] {
            let params = p(q, k);
            let accepted = (0..10_000)
                .filter(|_| random_toeplitz(params, &mut rng).determinant() != 0)
                .count();
            let frac = accepted as f64 / 10_000.0;
            assert!(frac >= lo && frac <= hi, "q={q}: {frac}");
        }
    }

    #[test]
    fn toeplitz_fast_path_matches_dense() {
        let params = p(2, 14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let t = random_toeplitz(params, &mut rng);
            let v = FieldVector::random(params, &mut rng);
            assert_eq!(t.mat_vec(&v), t.to_matrix().mat_vec(&v));
        }
        let params = p(7, 5);
        for _ in 0..200 {
            let t = random_toeplitz(params, &mut rng);
            let v = FieldVector::random(params, &mut rng);
            assert_eq!(t.mat_vec(&v), t.to_matrix().mat_vec(&v));
        }
    }

    #[test]
    fn toeplitz_diagonals_are_constant() {
        let params = p(5, 6);
        let t = random_toeplitz(params, &mut ChaCha8Rng::seed_from_u64(1));
        let m = t.to_matrix();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.entry(i, j), m.entry(i + 1, j + 1));
            }
        }
        assert_eq!(m.entry(0, 5), t.diagonals()[10]);
        assert_eq!(m.entry(5, 0), t.diagonals()[0]);
    }

    #[test]
    fn vertex_encoding_endpoints() {
        let params = p(3, 4);
        let first = FieldVector::new(params, &[1, 0, 0, 0]).unwrap();
        assert_eq!(vertex_index(params, &first).unwrap(), 0);
        let last = FieldVector::new(params, &[2, 2, 2, 2]).unwrap();
        assert_eq!(vertex_index(params, &last).unwrap(), 3usize.pow(4) - 2);
        assert!(vertex_index(params, &FieldVector::zero(params)).is_err());
        assert!(index_vertex(params, 80).is_err());
    }

    #[test]
    fn vertex_encoding_is_bijective() {
        for &(q, k) in &[(3, 3), (2, 13), (7, 4), (5, 5), (97, 2)] {
            let params = p(q, k);
            let n = params.vertex_count();
            assert!(n <= 10_000);
            let mut seen = vec![false; n];
            for i in 0..n {
                let v = index_vertex(params, i).unwrap();
                assert!(!v.is_zero());
                assert_eq!(vertex_index(params, &v).unwrap(), i);
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
    }

    #[test]
    fn packed_path_matches_generic() {
        let params = p(2, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let m = random_invertible_matrix(params, &mut rng).unwrap();
            let mut fast = IndexMapper::dense(&m);
            let mut slow = IndexMapper::with_kind(params, MapperKind::Dense(&m));
            for i in 0..params.vertex_count() {
                assert_eq!(fast.map(i), slow.map(i));
            }
            let t = random_invertible_toeplitz(params, &mut rng).unwrap();
            let mut fast = IndexMapper::toeplitz(&t);
            let mut slow = IndexMapper::with_kind(params, MapperKind::Toeplitz(&t));
            for i in 0..params.vertex_count() {
                assert_eq!(fast.map(i), slow.map(i));
            }
        }
    }

    proptest! {
        #[test]
        fn invertible_maps_permute_nonzero_vectors(seed in any::<u64>(), qi in 0usize..4, k in 2usize..6) {
            let q = [2u32, 3, 5, 7][qi];
            let params = p(q, k);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_invertible_matrix(params, &mut rng).unwrap();
            let inv = m.invert().unwrap();
            let mut v = FieldVector::random(params, &mut rng);
            if v.is_zero() {
                v = index_vertex(params, 0).unwrap();
            }
            let w = m.mat_vec(&v);
            prop_assert!(!w.is_zero());
            prop_assert_eq!(inv.mat_vec(&w), v);
        }
    }
}
