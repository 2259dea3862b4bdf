//! Schreier graphs, bipartite graphs built from bijections, and merged
//! biregular graphs.
//!
//! Every graph is strongly explicit: [`SchreierGraph::neighbors`] and the
//! bipartite `neighbors_*` methods compute adjacency on the fly from the
//! generators. [`GeneratorSet::action_tables`] caches the permutation each
//! generator induces on vertex indices; the linear operators used by the
//! spectral solver read those tables instead of a materialized matrix.
//!
//! Loops and parallel edges are kept. In the symmetric adjacency of a regular
//! graph a fixed point `T x = x` contributes 2 to the diagonal (once through
//! `T`, once through `T^-1`), so every row sums to the degree `2g`.

use std::io::Write;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    random_invertible_matrix, random_invertible_toeplitz, FieldMatrix, FieldParams,
    IndexMapper, LinearMap, ToeplitzGenerator,
};
use crate::seed::{derive, rng_from_seed};

/// Default refusal threshold for materialization (stored entries).
pub const DEFAULT_MATERIALIZE_CAP: usize = 1_000_000_000;

/// Below this many rows operator products run on the calling thread.
const PARALLEL_THRESHOLD: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "gl")]
    Gl,
    #[serde(rename = "toeplitz")]
    Toeplitz,
    #[serde(rename = "permutation", alias = "perm")]
    Permutation,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Gl => "gl",
            Model::Toeplitz => "toeplitz",
            Model::Permutation => "permutation",
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gl" => Ok(Model::Gl),
            "toeplitz" | "tp" => Ok(Model::Toeplitz),
            "perm" | "permutation" => Ok(Model::Permutation),
            other => Err(Error::params(format!(
                "unknown model '{other}' (expected gl, toeplitz or perm)"
            ))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The set acted on: nonzero vectors of `F_q^k`, or `n` abstract points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Field(FieldParams),
    Points(usize),
}

impl Space {
    pub fn size(&self) -> usize {
        match self {
            Space::Field(p) => p.vertex_count(),
            Space::Points(n) => *n,
        }
    }
}

/// An explicit permutation of `[0, n)` with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Permutation {
    pub fn new(forward: Vec<u32>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![u32::MAX; n];
        for (i, &f) in forward.iter().enumerate() {
            let f = f as usize;
            if f >= n || inverse[f] != u32::MAX {
                return Err(Error::InvalidGenerators(
                    "permutation array is not a bijection".into(),
                ));
            }
            inverse[f] = i as u32;
        }
        Ok(Permutation { forward, inverse })
    }

    pub fn identity(n: usize) -> Self {
        let forward: Vec<u32> = (0..n as u32).collect();
        Permutation {
            inverse: forward.clone(),
            forward,
        }
    }

    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut forward: Vec<u32> = (0..n as u32).collect();
        forward.shuffle(rng);
        Permutation::new(forward).expect("shuffle yields a bijection")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn inverse(&self) -> &[u32] {
        &self.inverse
    }

    pub fn inverted(&self) -> Permutation {
        Permutation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Gl(FieldMatrix),
    Toeplitz(ToeplitzGenerator),
    Permutation(Permutation),
}

impl Generator {
    pub fn model(&self) -> Model {
        match self {
            Generator::Gl(_) => Model::Gl,
            Generator::Toeplitz(_) => Model::Toeplitz,
            Generator::Permutation(_) => Model::Permutation,
        }
    }

    fn space(&self) -> Space {
        match self {
            Generator::Gl(m) => Space::Field(m.params()),
            Generator::Toeplitz(t) => Space::Field(t.params()),
            Generator::Permutation(p) => Space::Points(p.len()),
        }
    }

    pub fn to_record(&self) -> GeneratorRecord {
        match self {
            Generator::Gl(m) => GeneratorRecord {
                q: Some(m.params().q()),
                k: Some(m.params().k()),
                n: None,
                model: Model::Gl,
                entries: m.entries().to_vec(),
            },
            Generator::Toeplitz(t) => GeneratorRecord {
                q: Some(t.params().q()),
                k: Some(t.params().k()),
                n: None,
                model: Model::Toeplitz,
                entries: t.diagonals().to_vec(),
            },
            Generator::Permutation(p) => GeneratorRecord {
                q: None,
                k: None,
                n: Some(p.len()),
                model: Model::Permutation,
                entries: p.forward().to_vec(),
            },
        }
    }

    pub fn from_record(r: &GeneratorRecord) -> Result<Self> {
        let field = || -> Result<FieldParams> {
            match (r.q, r.k) {
                (Some(q), Some(k)) => FieldParams::new(q, k),
                _ => Err(Error::InvalidGenerators(
                    "matrix generator record needs q and k".into(),
                )),
            }
        };
        match r.model {
            Model::Gl => Ok(Generator::Gl(FieldMatrix::new(field()?, &r.entries)?)),
            Model::Toeplitz => Ok(Generator::Toeplitz(ToeplitzGenerator::new(
                field()?,
                &r.entries,
            )?)),
            Model::Permutation => {
                if let Some(n) = r.n {
                    if n != r.entries.len() {
                        return Err(Error::InvalidGenerators(format!(
                            "permutation record declares n = {n} but has {} entries",
                            r.entries.len()
                        )));
                    }
                }
                Ok(Generator::Permutation(Permutation::new(r.entries.clone())?))
            }
        }
    }
}

/// Serialized generator: `{"q", "k", "model", "entries"}`; entries are the
/// `k^2` row-major values for `gl`, the `2k - 1` diagonals for `toeplitz`,
/// and the image array (with `"n"` instead of `q`, `k`) for `permutation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    pub model: Model,
    pub entries: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSetRecord {
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub n: usize,
    pub seed: u64,
    pub generators: Vec<GeneratorRecord>,
}

/// Forward and inverse images of every vertex under one generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTable {
    pub forward: Vec<u32>,
    pub inverse: Vec<u32>,
}

/// A multiset of `g` invertible generators acting on a common vertex set.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    model: Model,
    space: Space,
    generators: Vec<Generator>,
    inverses: Vec<Option<FieldMatrix>>,
    seed: u64,
    tables: OnceLock<Vec<ActionTable>>,
}

impl PartialEq for GeneratorSet {
    fn eq(&self, other: &Self) -> bool {
        self.model == other.model
            && self.space == other.space
            && self.generators == other.generators
            && self.seed == other.seed
    }
}

impl GeneratorSet {
    /// Samples `g` generators of `model` acting on `space` from `seed`.
    ///
    /// A permutation model over a field space acts on `q^k - 1` points.
    pub fn sample(model: Model, space: Space, g: usize, seed: u64) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidGenerators("need at least one generator".into()));
        }
        let mut rng = rng_from_seed(seed);
        let generators = match (model, space) {
            (Model::Gl, Space::Field(p)) => (0..g)
                .map(|_| random_invertible_matrix(p, &mut rng).map(Generator::Gl))
                .collect::<Result<Vec<_>>>()?,
            (Model::Toeplitz, Space::Field(p)) => (0..g)
                .map(|_| random_invertible_toeplitz(p, &mut rng).map(Generator::Toeplitz))
                .collect::<Result<Vec<_>>>()?,
            (Model::Permutation, space) => {
                let n = space.size();
                if n < 2 {
                    return Err(Error::params("permutation model needs n >= 2"));
                }
                (0..g)
                    .map(|_| Generator::Permutation(Permutation::random(n, &mut rng)))
                    .collect()
            }
            (m, Space::Points(_)) => {
                return Err(Error::params(format!(
                    "model {m} needs field parameters q and k"
                )))
            }
        };
        Self::from_generators(generators, seed)
    }

    /// Validates a generator list (same model, same vertex set, invertible).
    pub fn from_generators(generators: Vec<Generator>, seed: u64) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidGenerators("need at least one generator".into()))?;
        let model = first.model();
        let space = first.space();
        if let Some(bad) = generators
            .iter()
            .find(|g| g.model() != model || g.space() != space)
        {
            return Err(Error::InvalidGenerators(format!(
                "mixed generators: {model} and {}",
                bad.model()
            )));
        }
        let inverses = generators
            .iter()
            .map(|g| match g {
                Generator::Gl(m) => m.invert().map(Some),
                Generator::Toeplitz(t) => t.to_matrix().invert().map(Some),
                Generator::Permutation(_) => Ok(None),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::InvalidGenerators("singular generator".into()))?;
        Ok(GeneratorSet {
            model,
            space,
            generators,
            inverses,
            seed,
            tables: OnceLock::new(),
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn field_params(&self) -> Option<FieldParams> {
        match self.space {
            Space::Field(p) => Some(p),
            Space::Points(_) => None,
        }
    }

    /// Number of vertices acted on.
    pub fn n(&self) -> usize {
        self.space.size()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(Error::VertexOutOfRange(format!(
                "vertex {v} not in [0, {})",
                self.n()
            )));
        }
        Ok(())
    }

    /// Image of vertex `v` under generator `j`, computed from the generator.
    pub fn apply(&self, j: usize, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(match &self.generators[j] {
            Generator::Gl(m) => IndexMapper::dense(m).map(v),
            Generator::Toeplitz(t) => IndexMapper::toeplitz(t).map(v),
            Generator::Permutation(p) => p.forward()[v] as usize,
        })
    }

    /// Image of vertex `v` under the inverse of generator `j`.
    pub fn apply_inverse(&self, j: usize, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(match (&self.generators[j], &self.inverses[j]) {
            (Generator::Permutation(p), _) => p.inverse()[v] as usize,
            (_, Some(inv)) => IndexMapper::dense(inv).map(v),
            (_, None) => unreachable!("matrix generators carry an inverse"),
        })
    }

    /// Cached permutation tables of every generator.
    pub fn action_tables(&self) -> &[ActionTable] {
        self.tables.get_or_init(|| {
            let n = self.n();
            self.generators
                .par_iter()
                .map(|g| {
                    let forward: Vec<u32> = match g {
                        Generator::Permutation(p) => return ActionTable {
                            forward: p.forward().to_vec(),
                            inverse: p.inverse().to_vec(),
                        },
                        Generator::Gl(m) => {
                            let mut mapper = IndexMapper::dense(m);
                            (0..n).map(|v| mapper.map(v) as u32).collect()
                        }
                        Generator::Toeplitz(t) => {
                            let mut mapper = IndexMapper::toeplitz(t);
                            (0..n).map(|v| mapper.map(v) as u32).collect()
                        }
                    };
                    let mut inverse = vec![0u32; n];
                    for (v, &w) in forward.iter().enumerate() {
                        inverse[w as usize] = v as u32;
                    }
                    ActionTable { forward, inverse }
                })
                .collect()
        })
    }

    /// The `2g` generators `T_1..T_g, T_1^-1..T_g^-1`. Toeplitz sets are
    /// expanded to dense matrices, since inverses of Toeplitz matrices are
    /// not Toeplitz in general.
    pub fn doubled(&self) -> GeneratorSet {
        let mut gens = Vec::with_capacity(2 * self.len());
        let dense = |g: &Generator| match g {
            Generator::Toeplitz(t) => Generator::Gl(t.to_matrix()),
            other => other.clone(),
        };
        gens.extend(self.generators.iter().map(dense));
        for (g, inv) in self.generators.iter().zip(&self.inverses) {
            gens.push(match (g, inv) {
                (Generator::Permutation(p), _) => Generator::Permutation(p.inverted()),
                (_, Some(m)) => Generator::Gl(m.clone()),
                _ => unreachable!(),
            });
        }
        GeneratorSet::from_generators(gens, self.seed).expect("inverses are valid generators")
    }

    pub fn to_record(&self) -> GeneratorSetRecord {
        let (q, k) = match self.space {
            Space::Field(p) => (Some(p.q()), Some(p.k())),
            Space::Points(_) => (None, None),
        };
        GeneratorSetRecord {
            model: self.model,
            q,
            k,
            n: self.n(),
            seed: self.seed,
            generators: self.generators.iter().map(Generator::to_record).collect(),
        }
    }

    pub fn from_record(r: &GeneratorSetRecord) -> Result<Self> {
        let generators = r
            .generators
            .iter()
            .map(Generator::from_record)
            .collect::<Result<Vec<_>>>()?;
        let set = Self::from_generators(generators, r.seed)?;
        if set.model != r.model || set.n() != r.n {
            return Err(Error::InvalidGenerators(format!(
                "record header (model {}, n {}) disagrees with generators (model {}, n {})",
                r.model,
                r.n,
                set.model,
                set.n()
            )));
        }
        Ok(set)
    }
}

fn check_cap(entries: usize, cap: usize) -> Result<()> {
    if entries > cap {
        return Err(Error::ResourceCap(format!(
            "materialization needs {entries} entries, cap is {cap}"
        )));
    }
    Ok(())
}

/// Undirected `2g`-regular Schreier graph of a generator set.
#[derive(Debug, Clone, PartialEq)]
pub struct SchreierGraph {
    gens: GeneratorSet,
}

impl SchreierGraph {
    pub fn new(gens: GeneratorSet) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidGenerators("need at least one generator".into()));
        }
        Ok(SchreierGraph { gens })
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn n(&self) -> usize {
        self.gens.n()
    }

    pub fn degree(&self) -> usize {
        2 * self.gens.len()
    }

    pub fn seed(&self) -> u64 {
        self.gens.seed()
    }

    /// `T_1 x, .., T_g x, T_1^-1 x, .., T_g^-1 x`, computed from the generators.
    pub fn neighbors(&self, v: usize) -> Result<Vec<usize>> {
        let g = self.gens.len();
        let mut out = Vec::with_capacity(2 * g);
        for j in 0..g {
            out.push(self.gens.apply(j, v)?);
        }
        for j in 0..g {
            out.push(self.gens.apply_inverse(j, v)?);
        }
        Ok(out)
    }

    pub fn materialize(&self, cap: usize) -> Result<SparseAdjacency> {
        let n = self.n();
        check_cap(n.saturating_mul(self.degree()), cap)?;
        let tables = self.gens.action_tables();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|v| {
                tables
                    .iter()
                    .map(|t| t.forward[v])
                    .chain(tables.iter().map(|t| t.inverse[v]))
                    .collect()
            })
            .collect();
        Ok(SparseAdjacency::from_rows(n, rows))
    }

    pub fn adjacency_operator(&self) -> AdjacencyOperator<'_> {
        AdjacencyOperator {
            tables: self.gens.action_tables(),
        }
    }
}

/// `x -> A x` for the symmetric adjacency of a Schreier graph.
pub struct AdjacencyOperator<'a> {
    tables: &'a [ActionTable],
}

impl AdjacencyOperator<'_> {
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let tables = self.tables;
        let row = |(v, o): (usize, &mut f64)| {
            let mut acc = 0.0;
            for t in tables {
                acc += x[t.forward[v] as usize];
                acc += x[t.inverse[v] as usize];
            }
            *o = acc;
        };
        if out.len() >= PARALLEL_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }
}

/// Shared surface of bipartite graphs with constant left and right degrees.
pub trait Biregular: Sync {
    fn left_size(&self) -> usize;
    fn right_size(&self) -> usize;
    fn left_degree(&self) -> usize;
    fn right_degree(&self) -> usize;
    fn seed(&self) -> u64;
    fn neighbors_left(&self, x: usize) -> Result<Vec<usize>>;
    fn neighbors_right(&self, y: usize) -> Result<Vec<usize>>;
    /// The `n_L x n_R` biadjacency block.
    fn materialize(&self, cap: usize) -> Result<SparseAdjacency>;
    fn biadjacency_operator(&self) -> BiadjacencyOperator<'_>;

    /// Full symmetric adjacency on `n_L + n_R` vertices, left part first.
    fn materialize_symmetric(&self, cap: usize) -> Result<SparseAdjacency> {
        Ok(self.materialize(cap / 2)?.bipartite_symmetric_form())
    }
}

/// Bipartite graph with edges `(x, s_j x)` for `g` bijections; no inverses.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    gens: GeneratorSet,
}

impl BipartiteGraph {
    pub fn new(gens: GeneratorSet) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidGenerators("need at least one generator".into()));
        }
        Ok(BipartiteGraph { gens })
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn n(&self) -> usize {
        self.gens.n()
    }

    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    fn view(&self) -> MergeView<'_> {
        MergeView {
            gens: &self.gens,
            gamma: 1,
            shuffle: None,
        }
    }
}

impl Biregular for BipartiteGraph {
    fn left_size(&self) -> usize {
        self.n()
    }
    fn right_size(&self) -> usize {
        self.n()
    }
    fn left_degree(&self) -> usize {
        self.degree()
    }
    fn right_degree(&self) -> usize {
        self.degree()
    }
    fn seed(&self) -> u64 {
        self.gens.seed()
    }
    fn neighbors_left(&self, x: usize) -> Result<Vec<usize>> {
        self.view().neighbors_left(x)
    }
    fn neighbors_right(&self, y: usize) -> Result<Vec<usize>> {
        self.view().neighbors_right(y)
    }
    fn materialize(&self, cap: usize) -> Result<SparseAdjacency> {
        self.view().materialize(cap)
    }
    fn biadjacency_operator(&self) -> BiadjacencyOperator<'_> {
        self.view().operator()
    }
}

/// A bipartite graph whose right part is merged in blocks of `gamma`.
///
/// Base right vertex `r` goes to merged vertex `pi(r) / gamma`, where `pi`
/// is the identity unless a shuffle seed is given.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedGraph {
    base: BipartiteGraph,
    gamma: usize,
    shuffle_seed: Option<u64>,
    shuffle: Option<Permutation>,
}

impl MergedGraph {
    pub fn new(base: BipartiteGraph, gamma: usize, shuffle_seed: Option<u64>) -> Result<Self> {
        let n = base.n();
        if gamma == 0 || n % gamma != 0 {
            return Err(Error::MergeDivisibility { n, gamma });
        }
        let shuffle = shuffle_seed.map(|s| Permutation::random(n, &mut rng_from_seed(s)));
        Ok(MergedGraph {
            base,
            gamma,
            shuffle_seed,
            shuffle,
        })
    }

    pub fn base(&self) -> &BipartiteGraph {
        &self.base
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn shuffle_seed(&self) -> Option<u64> {
        self.shuffle_seed
    }

    fn view(&self) -> MergeView<'_> {
        MergeView {
            gens: &self.base.gens,
            gamma: self.gamma,
            shuffle: self.shuffle.as_ref(),
        }
    }
}

/// Merges consecutive blocks `[j gamma, (j + 1) gamma)` of the right part.
pub fn merge_right(base: BipartiteGraph, gamma: usize) -> Result<MergedGraph> {
    MergedGraph::new(base, gamma, None)
}

impl Biregular for MergedGraph {
    fn left_size(&self) -> usize {
        self.base.n()
    }
    fn right_size(&self) -> usize {
        self.base.n() / self.gamma
    }
    fn left_degree(&self) -> usize {
        self.base.degree()
    }
    fn right_degree(&self) -> usize {
        self.base.degree() * self.gamma
    }
    fn seed(&self) -> u64 {
        self.base.gens.seed()
    }
    fn neighbors_left(&self, x: usize) -> Result<Vec<usize>> {
        self.view().neighbors_left(x)
    }
    fn neighbors_right(&self, y: usize) -> Result<Vec<usize>> {
        self.view().neighbors_right(y)
    }
    fn materialize(&self, cap: usize) -> Result<SparseAdjacency> {
        self.view().materialize(cap)
    }
    fn biadjacency_operator(&self) -> BiadjacencyOperator<'_> {
        self.view().operator()
    }
}

struct MergeView<'a> {
    gens: &'a GeneratorSet,
    gamma: usize,
    shuffle: Option<&'a Permutation>,
}

impl<'a> MergeView<'a> {
    fn right_size(&self) -> usize {
        self.gens.n() / self.gamma
    }

    #[inline]
    fn block_of(&self, r: usize) -> usize {
        match self.shuffle {
            Some(p) => p.forward()[r] as usize / self.gamma,
            None => r / self.gamma,
        }
    }

    #[inline]
    fn members(&self, y: usize) -> impl Iterator<Item = usize> + '_ {
        (y * self.gamma..(y + 1) * self.gamma).map(move |slot| match self.shuffle {
            Some(p) => p.inverse()[slot] as usize,
            None => slot,
        })
    }

    fn neighbors_left(&self, x: usize) -> Result<Vec<usize>> {
        (0..self.gens.len())
            .map(|j| self.gens.apply(j, x).map(|r| self.block_of(r)))
            .collect()
    }

    fn neighbors_right(&self, y: usize) -> Result<Vec<usize>> {
        if y >= self.right_size() {
            return Err(Error::VertexOutOfRange(format!(
                "right vertex {y} not in [0, {})",
                self.right_size()
            )));
        }
        let mut out = Vec::with_capacity(self.gens.len() * self.gamma);
        for r in self.members(y) {
            for j in 0..self.gens.len() {
                out.push(self.gens.apply_inverse(j, r)?);
            }
        }
        Ok(out)
    }

    fn materialize(&self, cap: usize) -> Result<SparseAdjacency> {
        let n = self.gens.n();
        check_cap(n.saturating_mul(self.gens.len()), cap)?;
        let tables = self.gens.action_tables();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|x| {
                tables
                    .iter()
                    .map(|t| self.block_of(t.forward[x] as usize) as u32)
                    .collect()
            })
            .collect();
        Ok(SparseAdjacency::from_rows(self.right_size(), rows))
    }

    fn operator(&self) -> BiadjacencyOperator<'a> {
        let tables = self.gens.action_tables();
        let n = self.gens.n();
        let (right_of, left_members) = if self.gamma == 1 && self.shuffle.is_none() {
            (None, None)
        } else {
            let right_of = (0..n).map(|r| self.block_of(r) as u32).collect();
            let members = (0..self.right_size())
                .flat_map(|y| self.members(y).map(|r| r as u32).collect::<Vec<_>>())
                .collect();
            (Some(right_of), Some(members))
        };
        BiadjacencyOperator {
            tables,
            gamma: self.gamma,
            left: n,
            right: self.right_size(),
            right_of,
            members: left_members,
        }
    }
}

/// `z -> B z` and `w -> B^T w` for a (merged) biadjacency block `B`.
pub struct BiadjacencyOperator<'a> {
    tables: &'a [ActionTable],
    gamma: usize,
    left: usize,
    right: usize,
    right_of: Option<Vec<u32>>,
    members: Option<Vec<u32>>,
}

impl BiadjacencyOperator<'_> {
    pub fn left_size(&self) -> usize {
        self.left
    }

    pub fn right_size(&self) -> usize {
        self.right
    }

    /// `out[x] = sum_j z[block(s_j x)]`; `z` lives on the right part.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        let row = |(x, o): (usize, &mut f64)| {
            let mut acc = 0.0;
            for t in self.tables {
                let r = t.forward[x] as usize;
                let y = match &self.right_of {
                    Some(map) => map[r] as usize,
                    None => r,
                };
                acc += z[y];
            }
            *o = acc;
        };
        if out.len() >= PARALLEL_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }

    /// `out[y] = sum over base vertices r in block y, sum_j w[s_j^-1 r]`.
    pub fn apply_transpose(&self, w: &[f64], out: &mut [f64]) {
        let gamma = self.gamma;
        let row = |(y, o): (usize, &mut f64)| {
            let mut acc = 0.0;
            for slot in y * gamma..(y + 1) * gamma {
                let r = match &self.members {
                    Some(m) => m[slot] as usize,
                    None => slot,
                };
                for t in self.tables {
                    acc += w[t.inverse[r] as usize];
                }
            }
            *o = acc;
        };
        if out.len() >= PARALLEL_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }
}

/// Compressed sparse rows with per-entry multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseAdjacency {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    multiplicities: Vec<u32>,
}

impl SparseAdjacency {
    /// Builds from one neighbor multiset per row.
    pub fn from_rows(cols: usize, rows: Vec<Vec<u32>>) -> Self {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        let mut multiplicities = Vec::new();
        row_offsets.push(0);
        for mut row in rows.iter().cloned() {
            row.sort_unstable();
            for c in row {
                if col_indices.len() > *row_offsets.last().unwrap()
                    && *col_indices.last().unwrap() == c
                {
                    *multiplicities.last_mut().unwrap() += 1;
                } else {
                    col_indices.push(c);
                    multiplicities.push(1);
                }
            }
            row_offsets.push(col_indices.len());
        }
        SparseAdjacency {
            rows: rows.len(),
            cols,
            row_offsets,
            col_indices,
            multiplicities,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// `(column, multiplicity)` pairs of row `i`, columns ascending.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[span.clone()]
            .iter()
            .zip(&self.multiplicities[span])
            .map(|(&c, &m)| (c as usize, m))
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.row(i).map(|(_, m)| m as u64).sum()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.multiplicities.iter().map(|&m| m as u64).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[span.clone()].binary_search(&(j as u32)) {
            Ok(pos) => self.multiplicities[span.start + pos],
            Err(_) => 0,
        }
    }

    pub fn transpose(&self) -> SparseAdjacency {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, m) in self.row(i) {
                rows[j].extend(std::iter::repeat_n(i as u32, m as usize));
            }
        }
        SparseAdjacency::from_rows(self.rows, rows)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.transpose() == *self
    }

    /// `[[0, B], [B^T, 0]]` for a biadjacency block `B`.
    pub fn bipartite_symmetric_form(&self) -> SparseAdjacency {
        let (nl, nr) = (self.rows, self.cols);
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(nl + nr);
        for i in 0..nl {
            let mut row = Vec::new();
            for (j, m) in self.row(i) {
                row.extend(std::iter::repeat_n((nl + j) as u32, m as usize));
            }
            rows.push(row);
        }
        let t = self.transpose();
        for j in 0..nr {
            let mut row = Vec::new();
            for (i, m) in t.row(j) {
                row.extend(std::iter::repeat_n(i as u32, m as usize));
            }
            rows.push(row);
        }
        SparseAdjacency::from_rows(nl + nr, rows)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, mult) in self.row(i) {
                m[(i, j)] = mult as f64;
            }
        }
        m
    }

    /// Writes `u v multiplicity` lines; with `upper_only`, only `u <= v`.
    pub fn write_edge_list<W: Write>(&self, mut out: W, upper_only: bool) -> std::io::Result<()> {
        for i in 0..self.rows {
            for (j, m) in self.row(i) {
                if !upper_only || i <= j {
                    writeln!(out, "{i} {j} {m}")?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Regular,
    Bipartite,
    Merged,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(GraphKind::Regular),
            "bipartite" => Ok(GraphKind::Bipartite),
            "merged" => Ok(GraphKind::Merged),
            other => Err(Error::params(format!(
                "unknown graph kind '{other}' (expected regular, bipartite or merged)"
            ))),
        }
    }
}

/// On-disk graph description: generators plus construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    #[serde(rename = "type")]
    pub kind: GraphKind,
    pub gens: GeneratorSetRecord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shuffle_seed: Option<u64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyGraph {
    Regular(SchreierGraph),
    Bipartite(BipartiteGraph),
    Merged(MergedGraph),
}

impl AnyGraph {
    pub fn build(
        kind: GraphKind,
        gens: GeneratorSet,
        gamma: Option<usize>,
        shuffle_seed: Option<u64>,
    ) -> Result<Self> {
        match kind {
            GraphKind::Regular => Ok(AnyGraph::Regular(SchreierGraph::new(gens)?)),
            GraphKind::Bipartite => Ok(AnyGraph::Bipartite(BipartiteGraph::new(gens)?)),
            GraphKind::Merged => {
                let gamma = gamma.ok_or_else(|| Error::params("merged graph needs gamma"))?;
                Ok(AnyGraph::Merged(MergedGraph::new(
                    BipartiteGraph::new(gens)?,
                    gamma,
                    shuffle_seed,
                )?))
            }
        }
    }

    pub fn kind(&self) -> GraphKind {
        match self {
            AnyGraph::Regular(_) => GraphKind::Regular,
            AnyGraph::Bipartite(_) => GraphKind::Bipartite,
            AnyGraph::Merged(_) => GraphKind::Merged,
        }
    }

    pub fn generators(&self) -> &GeneratorSet {
        match self {
            AnyGraph::Regular(g) => g.generators(),
            AnyGraph::Bipartite(g) => g.generators(),
            AnyGraph::Merged(g) => g.base().generators(),
        }
    }

    /// Total vertex count (both parts for bipartite graphs).
    pub fn vertex_count(&self) -> usize {
        match self {
            AnyGraph::Regular(g) => g.n(),
            AnyGraph::Bipartite(g) => g.left_size() + g.right_size(),
            AnyGraph::Merged(g) => g.left_size() + g.right_size(),
        }
    }

    /// `(d_L, d_R)`; both equal the degree for regular graphs.
    pub fn degrees(&self) -> (usize, usize) {
        match self {
            AnyGraph::Regular(g) => (g.degree(), g.degree()),
            AnyGraph::Bipartite(g) => (g.left_degree(), g.right_degree()),
            AnyGraph::Merged(g) => (g.left_degree(), g.right_degree()),
        }
    }

    pub fn from_descriptor(d: &GraphDescriptor) -> Result<Self> {
        let gens = GeneratorSet::from_record(&d.gens)?;
        Self::build(d.kind, gens, d.gamma, d.shuffle_seed)
    }

    pub fn to_descriptor(&self) -> GraphDescriptor {
        let (gamma, shuffle_seed) = match self {
            AnyGraph::Merged(m) => (Some(m.gamma()), m.shuffle_seed()),
            _ => (None, None),
        };
        let gens = self.generators();
        GraphDescriptor {
            kind: self.kind(),
            gens: gens.to_record(),
            gamma,
            shuffle_seed,
            seed: gens.seed(),
            meta: None,
        }
    }

    /// Regular graphs: symmetric adjacency. Bipartite graphs: biadjacency block.
    pub fn materialize(&self, cap: usize) -> Result<SparseAdjacency> {
        match self {
            AnyGraph::Regular(g) => g.materialize(cap),
            AnyGraph::Bipartite(g) => g.materialize(cap),
            AnyGraph::Merged(g) => g.materialize(cap),
        }
    }
}

/// Seed for a solver start vector tied to a graph seed.
pub(crate) fn start_vector_seed(graph_seed: u64) -> u64 {
    derive(graph_seed, 0x0053_5441_5254)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn fp(q: u32, k: usize) -> FieldParams {
        FieldParams::new(q, k).unwrap()
    }

    fn all_models(q: u32, k: usize, g: usize, seed: u64) -> Vec<GeneratorSet> {
        let space = Space::Field(fp(q, k));
        [Model::Gl, Model::Toeplitz, Model::Permutation]
            .into_iter()
            .map(|m| GeneratorSet::sample(m, space, g, seed).unwrap())
            .collect()
    }

    #[test]
    fn figure_scale_sizes() {
        let g = SchreierGraph::new(
            GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 14)), 15, 7).unwrap(),
        )
        .unwrap();
        assert_eq!((g.n(), g.degree()), (16383, 30));
        let g = SchreierGraph::new(
            GeneratorSet::sample(Model::Toeplitz, Space::Field(fp(7, 5)), 15, 7).unwrap(),
        )
        .unwrap();
        assert_eq!((g.n(), g.degree()), (16806, 30));
        let b = BipartiteGraph::new(
            GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 14)), 30, 1).unwrap(),
        )
        .unwrap();
        assert_eq!((b.left_size(), b.right_size(), b.left_degree()), (16383, 16383, 30));
        let base = BipartiteGraph::new(
            GeneratorSet::sample(Model::Permutation, Space::Points(16383), 10, 1).unwrap(),
        )
        .unwrap();
        let m = merge_right(base, 3).unwrap();
        assert_eq!(m.right_size(), 5461);
        assert_eq!((m.left_degree(), m.right_degree()), (10, 30));
    }

    #[test]
    fn model_mismatch_is_rejected() {
        assert!(GeneratorSet::sample(Model::Gl, Space::Points(10), 3, 0).is_err());
        assert!(GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 3)), 0, 0).is_err());
        let a = GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 3)), 1, 0).unwrap();
        let b = GeneratorSet::sample(Model::Toeplitz, Space::Field(fp(2, 3)), 1, 0).unwrap();
        let mixed = vec![a.generators()[0].clone(), b.generators()[0].clone()];
        assert!(GeneratorSet::from_generators(mixed, 0).is_err());
        let singular = FieldMatrix::new(fp(2, 2), &[1, 1, 1, 1]).unwrap();
        assert!(GeneratorSet::from_generators(vec![Generator::Gl(singular)], 0).is_err());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn identity_generators_give_loops() {
        let params = fp(2, 3);
        let gens = GeneratorSet::from_generators(
            vec![Generator::Gl(FieldMatrix::identity(params)); 3],
            0,
        )
        .unwrap();
        let g = SchreierGraph::new(gens).unwrap();
        let a = g.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
        for v in 0..g.n() {
            assert_eq!(g.neighbors(v).unwrap(), vec![v; 6]);
            assert_eq!(a.get(v, v), 6);
        }
    }

    #[test]
    fn regular_graphs_are_symmetric_and_regular() {
        for gens in all_models(3, 3, 4, 5) {
            let g = SchreierGraph::new(gens).unwrap();
            let a = g.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
            assert!(a.is_symmetric());
            for v in 0..g.n() {
                assert_eq!(a.row_sum(v), 8);
                assert_eq!(g.neighbors(v).unwrap().len(), 8);
            }
        }
    }

    #[test]
    fn neighbors_match_materialized_rows_small() {
        let gens = GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 3)), 1, 3).unwrap();
        let g = SchreierGraph::new(gens).unwrap();
        let a = g.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
        for v in 0..7 {
            let mut counts = std::collections::BTreeMap::new();
            for u in g.neighbors(v).unwrap() {
                *counts.entry(u).or_insert(0u32) += 1;
            }
            let row: std::collections::BTreeMap<usize, u32> = a.row(v).collect();
            assert_eq!(counts, row);
        }
    }

    #[test]
    fn neighbors_match_materialized_rows_sampled() {
        let mut rng = rng_from_seed(99);
        for gens in all_models(2, 10, 5, 21) {
            let g = SchreierGraph::new(gens.clone()).unwrap();
            let a = g.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
            let b = BipartiteGraph::new(gens).unwrap();
            let ba = b.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
            for _ in 0..100 {
                let v = rng.gen_range(0..g.n());
                let mut nb = g.neighbors(v).unwrap();
                nb.sort_unstable();
                let row: Vec<usize> = a
                    .row(v)
                    .flat_map(|(c, m)| std::iter::repeat_n(c, m as usize))
                    .collect();
                assert_eq!(nb, row);
                let mut nb = b.neighbors_left(v).unwrap();
                nb.sort_unstable();
                let row: Vec<usize> = ba
                    .row(v)
                    .flat_map(|(c, m)| std::iter::repeat_n(c, m as usize))
                    .collect();
                assert_eq!(nb, row);
            }
        }
    }

    #[test]
    fn out_of_range_vertices_error() {
        let gens = GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 3)), 2, 3).unwrap();
        let g = SchreierGraph::new(gens.clone()).unwrap();
        assert!(g.neighbors(7).is_err());
        let m = merge_right(BipartiteGraph::new(gens).unwrap(), 7).unwrap();
        assert!(m.neighbors_right(1).is_err());
        assert!(m.neighbors_left(7).is_err());
    }

    #[test]
    fn bipartite_degrees() {
        for gens in all_models(2, 4, 3, 8) {
            let b = BipartiteGraph::new(gens).unwrap();
            let a = b.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
            let t = a.transpose();
            for v in 0..15 {
                assert_eq!(a.row_sum(v), 3);
                assert_eq!(t.row_sum(v), 3);
                assert_eq!(b.neighbors_right(v).unwrap().len(), 3);
            }
        }
    }

    #[test]
    fn identity_bipartite_is_a_matching() {
        let gens = GeneratorSet::from_generators(
            vec![Generator::Permutation(Permutation::identity(9))],
            0,
        )
        .unwrap();
        let b = BipartiteGraph::new(gens).unwrap();
        for x in 0..9 {
            assert_eq!(b.neighbors_left(x).unwrap(), vec![x]);
        }
    }

    #[test]
    fn merge_divisibility_and_identity() {
        let gens = GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 4)), 3, 2).unwrap();
        let b = BipartiteGraph::new(gens).unwrap();
        assert!(merge_right(b.clone(), 5).is_ok());
        assert_eq!(
            merge_right(b.clone(), 4).unwrap_err(),
            Error::MergeDivisibility { n: 15, gamma: 4 }
        );
        assert!(merge_right(b.clone(), 0).is_err());
        let m1 = merge_right(b.clone(), 1).unwrap();
        assert_eq!(
            m1.materialize(DEFAULT_MATERIALIZE_CAP).unwrap(),
            b.materialize(DEFAULT_MATERIALIZE_CAP).unwrap()
        );
    }

    #[test]
    fn merge_conserves_edges_and_degrees() {
        for shuffle in [None, Some(17)] {
            for gens in all_models(2, 6, 4, 12) {
                let b = BipartiteGraph::new(gens).unwrap();
                let before = b.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
                let m = MergedGraph::new(b, 3, shuffle).unwrap();
                let after = m.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
                assert_eq!(before.total_multiplicity(), 63 * 4);
                assert_eq!(after.total_multiplicity(), 63 * 4);
                assert_eq!(after.cols(), 21);
                let t = after.transpose();
                for y in 0..21 {
                    assert_eq!(t.row_sum(y), 12);
                    let mut nb = m.neighbors_right(y).unwrap();
                    nb.sort_unstable();
                    let row: Vec<usize> = t
                        .row(y)
                        .flat_map(|(c, k)| std::iter::repeat_n(c, k as usize))
                        .collect();
                    assert_eq!(nb, row);
                }
            }
        }
    }

    #[test]
    fn operators_match_materialized_products() {
        let mut rng = rng_from_seed(4);
        for gens in all_models(3, 3, 3, 6) {
            let g = SchreierGraph::new(gens.clone()).unwrap();
            let dense = g.materialize(DEFAULT_MATERIALIZE_CAP).unwrap().to_dense();
            let x: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut y = vec![0.0; g.n()];
            g.adjacency_operator().apply(&x, &mut y);
            let expect = &dense * nalgebra::DVector::from_vec(x.clone());
            for i in 0..g.n() {
                assert!((y[i] - expect[i]).abs() < 1e-12);
            }
            let m = MergedGraph::new(BipartiteGraph::new(gens).unwrap(), 2, Some(3)).unwrap();
            let b = m.materialize(DEFAULT_MATERIALIZE_CAP).unwrap().to_dense();
            let op = m.biadjacency_operator();
            let z: Vec<f64> = (0..m.right_size()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut out = vec![0.0; m.left_size()];
            op.apply(&z, &mut out);
            let expect = &b * nalgebra::DVector::from_vec(z);
            for i in 0..m.left_size() {
                assert!((out[i] - expect[i]).abs() < 1e-12);
            }
            let mut back = vec![0.0; m.right_size()];
            op.apply_transpose(&x, &mut back);
            let expect = b.transpose() * nalgebra::DVector::from_vec(x);
            for i in 0..m.right_size() {
                assert!((back[i] - expect[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn materialize_cap_is_enforced() {
        let gens = GeneratorSet::sample(Model::Gl, Space::Field(fp(2, 5)), 2, 0).unwrap();
        let g = SchreierGraph::new(gens).unwrap();
        assert!(matches!(g.materialize(100), Err(Error::ResourceCap(_))));
        assert!(g.materialize(124).is_ok());
    }

    #[test]
    fn descriptor_roundtrip() {
        for gens in all_models(2, 4, 2, 31) {
            for kind in [GraphKind::Regular, GraphKind::Bipartite, GraphKind::Merged] {
                let g = AnyGraph::build(kind, gens.clone(), Some(5), Some(2)).unwrap();
                let json = serde_json::to_string(&g.to_descriptor()).unwrap();
                let back: GraphDescriptor = serde_json::from_str(&json).unwrap();
                assert_eq!(AnyGraph::from_descriptor(&back).unwrap(), g);
            }
        }
    }

    #[test]
    fn generator_record_layout() {
        let params = fp(3, 2);
        let m = FieldMatrix::new(params, &[1, 2, 0, 1]).unwrap();
        let json = serde_json::to_value(Generator::Gl(m).to_record()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"q": 3, "k": 2, "model": "gl", "entries": [1, 2, 0, 1]})
        );
        let t = ToeplitzGenerator::new(params, &[1, 0, 2]).unwrap();
        let json = serde_json::to_value(Generator::Toeplitz(t).to_record()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"q": 3, "k": 2, "model": "toeplitz", "entries": [1, 0, 2]})
        );
    }

    #[test]
    fn doubled_set_has_inverses() {
        for gens in all_models(2, 4, 3, 1) {
            let d = gens.doubled();
            assert_eq!(d.len(), 6);
            for j in 0..3 {
                for v in 0..15 {
                    let w = d.apply(j, v).unwrap();
                    assert_eq!(d.apply(j + 3, w).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn edge_list_format() {
        let gens = GeneratorSet::from_generators(
            vec![Generator::Permutation(Permutation::new(vec![1, 2, 0]).unwrap())],
            0,
        )
        .unwrap();
        let g = SchreierGraph::new(gens).unwrap();
        let mut buf = Vec::new();
        g.materialize(DEFAULT_MATERIALIZE_CAP)
            .unwrap()
            .write_edge_list(&mut buf, true)
            .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1 1\n0 2 1\n1 2 1\n");
    }
}
