mod common;

use common::oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schreier_core::field::FieldParams;
use schreier_core::graph::{AnyGraph, GeneratorSet, GraphKind, Model, Space};
use schreier_core::spectral::{dense_spectrum, measure, SolverOptions};

fn space(model: Model, q: u32, k: usize) -> Space {
    let p = FieldParams::new(q, k).unwrap();
    match model {
        Model::Permutation => Space::Points(p.vertex_count()),
        _ => Space::Field(p),
    }
}

const MODELS: [Model; 3] = [Model::Gl, Model::Toeplitz, Model::Permutation];
// (q, k) with q^k - 1 <= 512 and divisible by 2 or 3
const FIELDS: [(u32, usize); 5] = [(2, 6), (2, 8), (3, 4), (5, 3), (7, 3)];

fn random_graph(rng: &mut ChaCha8Rng) -> AnyGraph {
    let model = MODELS[rng.gen_range(0..3)];
    let (q, k) = FIELDS[rng.gen_range(0..FIELDS.len())];
    let kind = [GraphKind::Regular, GraphKind::Bipartite, GraphKind::Merged][rng.gen_range(0..3)];
    let g = rng.gen_range(2..8);
    let gens = GeneratorSet::sample(model, space(model, q, k), g, rng.gen()).unwrap();
    let n = gens.n();
    let gamma = (kind == GraphKind::Merged).then(|| if n % 3 == 0 { 3 } else { 2 });
    AnyGraph::build(kind, gens, gamma, None).unwrap()
}

#[test]
fn iterative_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let opts = SolverOptions::default();
    for _ in 0..30 {
        let graph = random_graph(&mut rng);
        let r = measure(&graph, &opts).unwrap();
        let expected = oracle::second_value(&graph);
        assert!(
            (r.lambda2_abs - expected).abs() <= 1e-8,
            "{:?} {:?}: {} vs {expected}",
            graph.kind(),
            graph.generators().model(),
            r.lambda2_abs
        );
        let (dl, dr) = graph.degrees();
        assert!((r.lambda1 - ((dl * dr) as f64).sqrt()).abs() <= 1e-10);
        assert!(r.residual <= opts.tol);
        assert!(r.lambda2_abs <= r.lambda1 + 1e-10);
    }
}

#[test]
fn dense_top_values_equal_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..10 {
        let graph = random_graph(&mut rng);
        let spectrum = dense_spectrum(&graph, 4096).unwrap();
        let top = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (dl, dr) = graph.degrees();
        assert!((top - ((dl * dr) as f64).sqrt()).abs() <= 1e-10);
    }
}

#[test]
fn bipartite_symmetric_form_is_symmetric_about_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..10 {
        let model = MODELS[rng.gen_range(0..3)];
        let gens = GeneratorSet::sample(model, space(model, 2, 6), 3, rng.gen()).unwrap();
        let ev = oracle::symmetric_form_spectrum(&oracle::biadjacency(&gens, 3));
        let len = ev.len();
        for i in 0..len {
            assert!((ev[i] + ev[len - 1 - i]).abs() <= 1e-9);
        }
    }
}

#[test]
fn merging_bound_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let opts = SolverOptions::default();
    for _ in 0..15 {
        let model = MODELS[rng.gen_range(0..3)];
        let (q, k, gamma) = [(2, 8, 3), (2, 8, 5), (2, 6, 3), (3, 4, 2), (5, 3, 2)][rng.gen_range(0..5)];
        let g = rng.gen_range(2..8);
        let gens = GeneratorSet::sample(model, space(model, q, k), g, rng.gen()).unwrap();
        let base = AnyGraph::build(GraphKind::Bipartite, gens.clone(), None, None).unwrap();
        let merged = AnyGraph::build(GraphKind::Merged, gens, Some(gamma), None).unwrap();
        let alpha = oracle::second_value(&base) / g as f64;
        let bound = schreier_core::bounds::bound_merged(g, gamma, alpha).unwrap();
        let lambda2 = measure(&merged, &opts).unwrap().lambda2_abs;
        assert!(lambda2 <= bound + 1e-9, "{lambda2} > {bound}");
    }
}

#[test]
fn doubling_matches_regular_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let opts = SolverOptions::default();
    for _ in 0..20 {
        let model = MODELS[rng.gen_range(0..3)];
        let (q, k) = FIELDS[rng.gen_range(0..FIELDS.len())];
        let gens = GeneratorSet::sample(model, space(model, q, k), rng.gen_range(2..6), rng.gen()).unwrap();
        let regular = AnyGraph::build(GraphKind::Regular, gens.clone(), None, None).unwrap();
        let doubled = AnyGraph::build(GraphKind::Bipartite, gens.doubled(), None, None).unwrap();
        let a = measure(&regular, &opts).unwrap();
        let b = measure(&doubled, &opts).unwrap();
        assert!((a.normalized - b.normalized).abs() <= 1e-8, "{} vs {}", a.normalized, b.normalized);
    }
}
