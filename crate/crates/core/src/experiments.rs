//! Seeded Monte Carlo runs over random graphs.
//!
//! Trial `t` of a run with master seed `s` samples its generators from
//! `child_seed(s, t)`, so results depend only on the spec, never on the
//! number of worker threads or on scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::graph::{AnyGraph, GeneratorSet, GraphKind, Model, SchreierGraph, Space};
use crate::seed::{child_seed, rng_from_seed};
use crate::spectral::{measure, threshold_unit, SolverOptions, ThresholdKind, DEFAULT_TOL};

pub const DEFAULT_TRIALS: usize = 5000;
pub const DEFAULT_BINS: usize = 40;

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub kind: GraphKind,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Point count for the permutation model when `q`, `k` are absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Generator count: degree `2g` (regular) or `g` (bipartite).
    pub g: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub keep_samples: bool,
}

impl ExperimentSpec {
    /// Regular graph spec with default trials, bins and tolerance.
    pub fn regular(model: Model, space: Space, g: usize, master_seed: u64) -> Self {
        let (q, k, n) = match space {
            Space::Field(p) => (Some(p.q()), Some(p.k()), None),
            Space::Points(n) => (None, None, Some(n)),
        };
        ExperimentSpec {
            label: None,
            kind: GraphKind::Regular,
            model,
            q,
            k,
            n,
            g,
            gamma: None,
            trials: DEFAULT_TRIALS,
            bins: DEFAULT_BINS,
            master_seed,
            tol: DEFAULT_TOL,
            keep_samples: false,
        }
    }

    pub fn with_kind(mut self, kind: GraphKind, gamma: Option<usize>) -> Self {
        self.kind = kind;
        self.gamma = gamma;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_bins(mut self, bins: usize) -> Self {
        self.bins = bins;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// `gl-q2k10`, `perm-n1023`, with `-g<g>` or `-bip`/`-merged<γ>` suffixes
    /// only when set explicitly through `with_label`.
    pub fn display_label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match (self.model, self.q, self.k, self.n) {
            (Model::Permutation, _, _, Some(n)) => format!("perm-n{n}"),
            (Model::Permutation, Some(q), Some(k), None) => {
                format!("perm-n{}", (q as u64).pow(k as u32) - 1)
            }
            (m, Some(q), Some(k), _) => format!("{}-q{q}k{k}", m.as_str()),
            (m, _, _, _) => m.as_str().to_string(),
        }
    }

    pub fn space(&self) -> Result<Space> {
        match (self.model, self.q, self.k, self.n) {
            (_, Some(q), Some(k), None) => Ok(Space::Field(FieldParams::new(q, k)?)),
            (Model::Permutation, None, None, Some(n)) => Ok(Space::Points(n)),
            (Model::Permutation, _, _, _) => Err(Error::params(
                "permutation model needs either q and k, or n (not both)",
            )),
            (m, _, _, _) => Err(Error::params(format!(
                "model {m} needs q and k and no explicit n"
            ))),
        }
    }

    /// Normalization unit shared by every trial.
    pub fn unit(&self) -> Result<f64> {
        threshold_unit(self.threshold_kind()?)
    }

    fn threshold_kind(&self) -> Result<ThresholdKind> {
        Ok(match self.kind {
            GraphKind::Regular => ThresholdKind::Regular { degree: 2 * self.g },
            GraphKind::Bipartite => ThresholdKind::Bipartite {
                left: self.g,
                right: self.g,
            },
            GraphKind::Merged => {
                let gamma = self
                    .gamma
                    .ok_or_else(|| Error::params("merged graphs need gamma"))?;
                ThresholdKind::Bipartite {
                    left: self.g,
                    right: gamma * self.g,
                }
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::params("trials must be at least 1"));
        }
        if self.bins == 0 {
            return Err(Error::params("bins must be at least 1"));
        }
        if self.g == 0 {
            return Err(Error::params("g must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::params("solver tolerance must be positive"));
        }
        match (self.kind, self.gamma) {
            (GraphKind::Merged, None) => return Err(Error::params("merged graphs need gamma")),
            (GraphKind::Merged, Some(gamma)) => {
                let n = self.space()?.size();
                if gamma == 0 || n % gamma != 0 {
                    return Err(Error::MergeDivisibility { n, gamma });
                }
            }
            (_, Some(_)) => return Err(Error::params("gamma applies to merged graphs only")),
            _ => {}
        }
        self.space()?;
        self.unit()?;
        Ok(())
    }

    /// Approximate work of one trial, in generator applications.
    fn trial_work(&self) -> Result<u128> {
        Ok(self.space()?.size() as u128 * self.g as u128)
    }

    /// Builds the graph of trial `t`.
    pub fn build_trial_graph(&self, t: usize) -> Result<AnyGraph> {
        let seed = child_seed(self.master_seed, t as u64);
        let gens = GeneratorSet::sample(self.model, self.space()?, self.g, seed)?;
        AnyGraph::build(self.kind, gens, self.gamma, None)
    }
}

/// Execution settings that do not change results.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Refuse runs whose `trials * n * g` exceeds this.
    pub work_budget: Option<u128>,
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::params("thread count must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Internal(format!("thread pool: {e}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Fraction of samples strictly below 1.0.
    pub ramanujan_fraction: f64,
    pub q01: f64,
    pub q50: f64,
    pub q99: f64,
}

/// Quantile by linear interpolation between order statistics at
/// `h = (n - 1) p`.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summary_stats(samples: &[f64]) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::params("summary of an empty sample"));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Summary {
        count: n,
        mean,
        variance,
        min: sorted[0],
        max: sorted[n - 1],
        ramanujan_fraction: samples.iter().filter(|&&x| x < 1.0).count() as f64 / n as f64,
        q01: quantile(&sorted, 0.01),
        q50: quantile(&sorted, 0.5),
        q99: quantile(&sorted, 0.99),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub label: String,
    pub unit: f64,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub trials: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
    pub summary: Summary,
}

impl Histogram {
    /// `bin_left,bin_right,count` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[i], self.edges[i + 1], c));
        }
        out
    }
}

/// `bins + 1` equally spaced edges spanning `[lo, hi]`; a degenerate range
/// is widened so edges stay strictly increasing.
pub fn grid(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = (lo.abs() * 1e-6).max(1e-9);
        (lo - pad, hi + pad)
    };
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
    edges.push(hi);
    edges
}

/// Counts per bin; the last bin is closed on the right.
pub fn bin_counts(samples: &[f64], edges: &[f64]) -> Vec<u64> {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut counts = vec![0u64; bins];
    for &x in samples {
        let pos = ((x - lo) / (hi - lo) * bins as f64).floor();
        let i = if pos < 0.0 { 0 } else { (pos as usize).min(bins - 1) };
        counts[i] += 1;
    }
    counts
}

/// Normalized second values of every trial, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    pub samples: Vec<f64>,
    pub failures: usize,
}

pub fn run_trials(spec: &ExperimentSpec, opts: &RunOptions) -> Result<TrialSet> {
    spec.validate()?;
    if let Some(budget) = opts.work_budget {
        let work = spec.trial_work()? * spec.trials as u128;
        if work > budget {
            return Err(Error::ResourceCap(format!(
                "experiment needs {work} generator applications, budget is {budget}"
            )));
        }
    }
    let solver = SolverOptions::with_tol(spec.tol);
    let outcomes: Vec<Result<f64>> = with_pool(opts.threads, || {
        (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let graph = spec.build_trial_graph(t)?;
                measure(&graph, &solver).map(|r| r.normalized)
            })
            .collect()
    })?;
    let mut samples = Vec::with_capacity(spec.trials);
    let mut failures = 0;
    for o in outcomes {
        match o {
            Ok(v) => samples.push(v),
            Err(Error::NonConvergence { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if failures * 100 > spec.trials {
        return Err(Error::Experiment(format!(
            "{failures} of {} trials failed to converge",
            spec.trials
        )));
    }
    if samples.is_empty() {
        return Err(Error::Experiment("no trial converged".into()));
    }
    Ok(TrialSet { samples, failures })
}

fn histogram_from(spec: &ExperimentSpec, set: TrialSet, edges: Vec<f64>) -> Result<Histogram> {
    let counts = bin_counts(&set.samples, &edges);
    let summary = summary_stats(&set.samples)?;
    Ok(Histogram {
        label: spec.display_label(),
        unit: spec.unit()?,
        edges,
        counts,
        trials: spec.trials,
        failures: set.failures,
        samples: spec.keep_samples.then_some(set.samples),
        summary,
    })
}

pub fn run_distribution(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Histogram> {
    let set = run_trials(spec, opts)?;
    let lo = set.samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = set.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    histogram_from(spec, set, grid(lo, hi, spec.bins))
}

/// Runs several specs with a shared normalization unit and bins them on one
/// grid spanning all samples (bin count from the first spec).
pub fn compare_models(specs: &[ExperimentSpec], opts: &RunOptions) -> Result<Vec<Histogram>> {
    let first = specs
        .first()
        .ok_or_else(|| Error::params("compare_models needs at least one spec"))?;
    let unit = first.unit()?;
    for s in specs {
        s.validate()?;
        let u = s.unit()?;
        if (u - unit).abs() > 1e-12 * unit {
            return Err(Error::params(format!(
                "unit mismatch: {} has {u}, {} has {unit}",
                s.display_label(),
                first.display_label()
            )));
        }
    }
    let sets = specs
        .iter()
        .map(|s| run_trials(s, opts))
        .collect::<Result<Vec<_>>>()?;
    let all = sets.iter().flat_map(|s| s.samples.iter().copied());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let edges = grid(lo, hi, first.bins);
    specs
        .iter()
        .zip(sets)
        .map(|(s, set)| histogram_from(s, set, edges.clone()))
        .collect()
}

/// Monte Carlo estimate of closed-walk probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkEstimate {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    /// Trials whose word has a letter occurring exactly once.
    pub singleton_trials: usize,
    pub conditional: f64,
    pub conditional_se: f64,
    pub unconditional: f64,
    pub unconditional_se: f64,
    /// `1 / n`.
    pub reference: f64,
}

fn proportion(hits: usize, total: usize) -> (f64, f64) {
    if total == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Samples, per trial, fresh generators of the template's model and size, a
/// uniform signed word of length `2m` and a uniform start vertex, and
/// records whether the word maps the vertex to itself.
pub fn walk_probe(template: &SchreierGraph, m: usize, trials: usize, seed: u64) -> Result<WalkEstimate> {
    let gens = template.generators();
    walk_probe_params(gens.model(), gens.space(), gens.len(), m, trials, seed)
}

pub fn walk_probe_params(
    model: Model,
    space: Space,
    g: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<WalkEstimate> {
    if g < 2 {
        return Err(Error::params("walk probe needs at least two generators"));
    }
    if m == 0 || trials == 0 {
        return Err(Error::params("walk probe needs m >= 1 and trials >= 1"));
    }
    let n = space.size();
    let outcomes: Vec<Result<(bool, bool)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = child_seed(seed, t as u64);
            let mut rng = rng_from_seed(trial_seed ^ 0x5741_4C4B);
            let word: Vec<(usize, bool)> = (0..2 * m)
                .map(|_| (rng.gen_range(0..g), rng.gen_bool(0.5)))
                .collect();
            let mut occurrences = vec![0u32; g];
            for &(letter, _) in &word {
                occurrences[letter] += 1;
            }
            let singleton = occurrences.contains(&1);
            let gens = GeneratorSet::sample(model, space, g, trial_seed)?;
            let start = rng.gen_range(0..n);
            let mut v = start;
            for &(letter, inverse) in word.iter().rev() {
                v = if inverse {
                    gens.apply_inverse(letter, v)?
                } else {
                    gens.apply(letter, v)?
                };
            }
            Ok((singleton, v == start))
        })
        .collect();
    let mut singles = 0;
    let mut single_closed = 0;
    let mut closed = 0;
    for o in outcomes {
        let (singleton, is_closed) = o?;
        closed += is_closed as usize;
        if singleton {
            singles += 1;
            single_closed += is_closed as usize;
        }
    }
    let (conditional, conditional_se) = proportion(single_closed, singles);
    let (unconditional, unconditional_se) = proportion(closed, trials);
    Ok(WalkEstimate {
        n,
        m,
        trials,
        singleton_trials: singles,
        conditional,
        conditional_se,
        unconditional,
        unconditional_se,
        reference: 1.0 / n as f64,
    })
}

/// A named list of comparison groups; each group shares one bin grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub groups: Vec<Vec<ExperimentSpec>>,
}

pub const PRESET_NAMES: [&str; 10] = [
    "fig1-desk", "fig1-full", "fig2-desk", "fig2-full", "fig3-desk", "fig3-full", "fig4-desk",
    "fig4-full", "fig5-desk", "fig5-full",
];

fn field(q: u32, k: usize) -> Space {
    Space::Field(FieldParams::new(q, k).expect("preset parameters are valid"))
}

/// Figure protocols. `-desk` presets use `2^10 - 1` and `7^3 - 1` vertices
/// with 200 trials; `-full` presets use `2^14 - 1` and `7^5 - 1` with 5000.
///
/// Trial seeds of the `i`-th spec of a preset derive from
/// `child_seed(master_seed, i)`.
pub fn preset(name: &str, master_seed: u64) -> Result<Preset> {
    let (full, base) = match name.rsplit_once('-') {
        Some((base, "desk")) => (false, base),
        Some((base, "full")) => (true, base),
        _ => return Err(Error::params(format!("unknown preset '{name}'"))),
    };
    let (k2, q7k, trials) = if full { (14, 5, 5000) } else { (10, 3, 200) };
    let perm_n = (1usize << k2) - 1;
    let reg = |model, space, g| ExperimentSpec::regular(model, space, g, 0).with_trials(trials);
    let mut groups: Vec<Vec<ExperimentSpec>> = match base {
        "fig1" => vec![vec![
            reg(Model::Gl, field(2, k2), 15),
            reg(Model::Permutation, Space::Points(perm_n), 15),
            reg(Model::Gl, field(7, q7k), 15),
        ]],
        "fig2" => {
            let mut groups: Vec<Vec<ExperimentSpec>> = [5, 15, 30, 60]
                .into_iter()
                .map(|g| {
                    vec![reg(Model::Gl, field(2, k2), g).with_label(format!("gl-q2k{k2}-g{g}"))]
                })
                .collect();
            groups.push(
                (k2 - 2..=k2 + 1)
                    .map(|k| reg(Model::Gl, field(2, k), 15))
                    .collect(),
            );
            groups
        }
        "fig3" => vec![[
            (Model::Permutation, Space::Points(perm_n)),
            (Model::Gl, field(2, k2)),
            (Model::Gl, field(7, q7k)),
        ]
        .into_iter()
        .map(|(model, space)| {
            let s = reg(model, space, 30).with_kind(GraphKind::Bipartite, None);
            let label = format!("{}-bip", s.display_label());
            s.with_label(label)
        })
        .collect()],
        "fig4" => vec![[
            (Model::Permutation, Space::Points(perm_n)),
            (Model::Gl, field(2, k2)),
            (Model::Gl, field(7, q7k)),
        ]
        .into_iter()
        .map(|(model, space)| {
            let s = reg(model, space, 10).with_kind(GraphKind::Merged, Some(3));
            let label = format!("{}-merged3", s.display_label());
            s.with_label(label)
        })
        .collect()],
        "fig5" => vec![
            vec![
                reg(Model::Toeplitz, field(2, k2), 15),
                reg(Model::Gl, field(2, k2), 15),
                reg(Model::Toeplitz, field(7, q7k), 15),
                reg(Model::Gl, field(7, q7k), 15),
            ],
            (k2 - 2..=k2 + 1)
                .map(|k| reg(Model::Toeplitz, field(2, k), 15))
                .collect(),
        ],
        _ => return Err(Error::params(format!("unknown preset '{name}'"))),
    };
    let mut index = 0u64;
    for group in &mut groups {
        for spec in group.iter_mut() {
            spec.master_seed = child_seed(master_seed, index);
            index += 1;
        }
    }
    let name = PRESET_NAMES
        .iter()
        .find(|n| **n == name)
        .copied()
        .ok_or_else(|| Error::params(format!("unknown preset '{name}'")))?;
    Ok(Preset { name, groups })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec::regular(Model::Gl, field(2, 7), 4, 11)
            .with_trials(24)
            .with_bins(8)
    }

    #[test]
    fn summary_of_constant_list() {
        let s = summary_stats(&[0.75; 10]).unwrap();
        assert_eq!(s.mean, 0.75);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.q50, 0.75);
        assert!(summary_stats(&[]).is_err());
    }

    #[test]
    fn ramanujan_fraction_half() {
        let s = summary_stats(&[0.9, 1.1]).unwrap();
        assert_eq!(s.ramanujan_fraction, 0.5);
        assert!((s.q50 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quantiles_interpolate() {
        let xs: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let s = summary_stats(&xs).unwrap();
        assert_eq!((s.q01, s.q50, s.q99), (1.0, 50.0, 99.0));
    }

    #[test]
    fn grid_and_counts() {
        let edges = grid(0.0, 1.0, 4);
        assert_eq!(edges, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(bin_counts(&[0.0, 0.3, 0.5, 1.0, 0.99], &edges), vec![1, 1, 1, 2]);
        let flat = grid(2.0, 2.0, 3);
        assert!(flat.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(bin_counts(&[2.0, 2.0], &flat).iter().sum::<u64>(), 2);
    }

    #[test]
    fn spec_validation() {
        assert!(small_spec().validate().is_ok());
        assert!(small_spec().with_trials(0).validate().is_err());
        assert!(small_spec().with_bins(0).validate().is_err());
        let merged = small_spec().with_kind(GraphKind::Merged, Some(2));
        assert!(matches!(merged.validate(), Err(Error::MergeDivisibility { .. })));
        assert!(small_spec().with_kind(GraphKind::Merged, None).validate().is_err());
        let mut perm = ExperimentSpec::regular(Model::Gl, Space::Points(100), 3, 0);
        assert!(perm.validate().is_err());
        perm.model = Model::Permutation;
        assert!(perm.validate().is_ok());
    }

    #[test]
    fn histogram_counts_add_up() {
        let h = run_distribution(&small_spec(), &RunOptions::default()).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>() as usize + h.failures, 24);
        assert_eq!(h.edges.len(), 9);
        assert!(h.edges.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(h.label, "gl-q2k7");
        assert!(h.to_csv().starts_with("bin_left,bin_right,count\n"));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let spec = small_spec();
        let one = run_distribution(&spec, &RunOptions { threads: Some(1), work_budget: None }).unwrap();
        let four = run_distribution(&spec, &RunOptions { threads: Some(4), work_budget: None }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn work_budget_is_enforced() {
        let opts = RunOptions { threads: None, work_budget: Some(10) };
        assert!(matches!(run_trials(&small_spec(), &opts), Err(Error::ResourceCap(_))));
    }

    #[test]
    fn compare_models_share_grid_and_reject_unit_mismatch() {
        let a = small_spec();
        let mut b = small_spec();
        b.model = Model::Toeplitz;
        let hs = compare_models(&[a.clone(), b], &RunOptions::default()).unwrap();
        assert_eq!(hs[0].edges, hs[1].edges);
        let mut c = small_spec();
        c.g = 5;
        assert!(compare_models(&[a, c], &RunOptions::default()).is_err());
    }

    #[test]
    fn walk_probe_needs_two_generators() {
        assert!(walk_probe_params(Model::Gl, field(2, 4), 1, 2, 10, 0).is_err());
        let e = walk_probe_params(Model::Gl, field(2, 4), 3, 1, 200, 0).unwrap();
        assert_eq!(e.reference, 1.0 / 15.0);
        assert!(e.singleton_trials <= 200);
    }

    #[test]
    fn presets_are_well_formed() {
        for name in PRESET_NAMES {
            let p = preset(name, 1).unwrap();
            for group in &p.groups {
                for s in group {
                    s.validate().unwrap();
                }
                let u = group[0].unit().unwrap();
                assert!(group.iter().all(|s| s.unit().unwrap() == u));
            }
        }
        let p = preset("fig1-desk", 1).unwrap();
        let labels: Vec<String> = p.groups[0].iter().map(|s| s.display_label()).collect();
        assert_eq!(labels, ["gl-q2k10", "perm-n1023", "gl-q7k3"]);
        assert!(preset("fig9-desk", 1).is_err());
        assert!(preset("fig1", 1).is_err());
    }
}
