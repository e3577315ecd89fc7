//! Example networks and random generators used by tests, benches and the CLI.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::network::TensorNetwork;
use crate::tensor::{Axis, IndexLabel, Tensor};

fn random_tensor<F: Field>(field: F, axes: Vec<Axis>, rng: &mut ChaCha8Rng) -> Tensor<F> {
    Tensor::from_fn(field, axes, |_| field.sample_int(rng, 0, 100)).expect("valid axes")
}

fn build<F: Field>(field: F, seed: u64, spec: &[(&str, Vec<(&str, usize)>)]) -> TensorNetwork<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensors = spec.iter().map(|(id, axes)| {
        let axes = axes.iter().map(|(l, d)| Axis::new(*l, *d)).collect();
        (id.to_string(), random_tensor(field, axes, &mut rng))
    });
    TensorNetwork::from_tensors(field, tensors).expect("fixture is well formed")
}

/// A 2x3 grid with bond dimension `bond`. The left vertical bond `a`
/// (L = 4) and the right vertical bond `b` (L = 3) do not touch a common
/// tensor; `p` is an open leg on the middle of the top row.
///
/// ```text
/// T11 -h1- T12 -h2- T13
///  a        v        b
/// T21 -h3- T22 -h4- T23
/// ```
pub fn grid_two_node<F: Field>(field: F, bond: usize, seed: u64) -> (TensorNetwork<F>, Vec<IndexLabel>) {
    let net = build(
        field,
        seed,
        &[
            ("T11", vec![("h1", bond), ("a", 4)]),
            ("T12", vec![("h1", bond), ("h2", bond), ("v", bond), ("p", 2)]),
            ("T13", vec![("h2", bond), ("b", 3)]),
            ("T21", vec![("a", 4), ("h3", bond)]),
            ("T22", vec![("h3", bond), ("v", bond), ("h4", bond)]),
            ("T23", vec![("h4", bond), ("b", 3)]),
        ],
    );
    (net, vec![IndexLabel::from("a"), IndexLabel::from("b")])
}

/// Three tensors on hyperedge `a` (L = 2) and four on hyperedge `b`
/// (L = 2), tied together by a chain of bonds; `o` is open.
pub fn hyperedge_pair<F: Field>(field: F, seed: u64) -> (TensorNetwork<F>, Vec<IndexLabel>) {
    let net = build(
        field,
        seed,
        &[
            ("A1", vec![("a", 2), ("c1", 2)]),
            ("A2", vec![("a", 2), ("c1", 2), ("c2", 2)]),
            ("A3", vec![("a", 2), ("c2", 2), ("c3", 2)]),
            ("B1", vec![("b", 2), ("c3", 2), ("c4", 2)]),
            ("B2", vec![("b", 2), ("c4", 2), ("c5", 2)]),
            ("B3", vec![("b", 2), ("c5", 2), ("c6", 2)]),
            ("B4", vec![("b", 2), ("c6", 2), ("o", 2)]),
        ],
    );
    (net, vec![IndexLabel::from("a"), IndexLabel::from("b")])
}

/// A ring of tensors realizing the given `(m, L)` plan. Sliced index `i` is
/// labelled `s{i+1}` and touches `m` consecutive ring tensors, which are
/// joined by bonds of dimension `bond`; the first tensor has an open leg `o`.
pub fn plan_network<F: Field>(field: F, params: &[(usize, usize)], bond: usize, seed: u64) -> TensorNetwork<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<(String, usize)> = Vec::new();
    for (i, (m, l)) in params.iter().enumerate() {
        for _ in 0..*m {
            members.push((format!("s{}", i + 1), *l));
        }
    }
    let count = members.len();
    let tensors = members.iter().enumerate().map(|(k, (label, l))| {
        let mut axes = vec![Axis::new(label.as_str(), *l)];
        if count > 1 {
            let prev = (k + count - 1) % count;
            if count == 2 {
                axes.push(Axis::new("r0", bond));
            } else {
                axes.push(Axis::new(format!("r{prev}"), bond));
                axes.push(Axis::new(format!("r{k}"), bond));
            }
        }
        if k == 0 {
            axes.push(Axis::new("o", 2));
        }
        (format!("T{k:02}"), random_tensor(field, axes, &mut rng))
    });
    TensorNetwork::from_tensors(field, tensors).expect("plan network is well formed")
}

/// Two rank-`k` tensors of uniform dimension `dim` joined by the 2-node edge
/// `s`; the other `k - 1` legs of each are open. Used for cost scaling.
pub fn uniform_pair<F: Field>(field: F, k: usize, dim: usize, seed: u64) -> TensorNetwork<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensors = ["A", "B"].iter().map(|id| {
        let mut axes = vec![Axis::new("s", dim)];
        for j in 1..k {
            axes.push(Axis::new(format!("{}{j}", id.to_lowercase()), dim));
        }
        (id.to_string(), random_tensor(field, axes, &mut rng))
    });
    TensorNetwork::from_tensors(field, tensors).expect("pair is well formed")
}

/// A random network of at most `max_tensors` tensors with dimensions up to
/// `max_dim`, plus up to `max_sliced` pairwise non-adjacent closed labels.
pub fn random_network<F: Field>(
    field: F,
    rng: &mut ChaCha8Rng,
    max_tensors: usize,
    max_dim: usize,
    max_sliced: usize,
) -> (TensorNetwork<F>, Vec<IndexLabel>) {
    loop {
        let n = rng.gen_range(2..=max_tensors.max(2));
        let label_count = rng.gen_range(1..=(n + 2).min(9));
        let mut axes: Vec<Vec<Axis>> = vec![Vec::new(); n];
        for l in 0..label_count {
            let dim = rng.gen_range(1..=max_dim);
            let m = rng.gen_range(1..=3.min(n));
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(rng);
            for &t in &ids[..m] {
                axes[t].push(Axis::new(format!("e{l}"), dim));
            }
        }
        let volume: u128 = axes
            .iter()
            .map(|a| a.iter().map(|x| x.dim as u128).product::<u128>())
            .max()
            .unwrap_or(1);
        if volume > 4096 {
            continue;
        }
        let tensors = axes
            .into_iter()
            .enumerate()
            .map(|(i, a)| (format!("t{i}"), random_tensor(field, a, rng)))
            .collect::<Vec<_>>();
        let net = TensorNetwork::from_tensors(field, tensors).expect("generated network is well formed");
        let plan = random_plan(&net, rng, max_sliced);
        return (net, plan);
    }
}

/// Up to `max` closed labels of `net`, no two touching a common tensor.
pub fn random_plan<F: Field>(net: &TensorNetwork<F>, rng: &mut ChaCha8Rng, max: usize) -> Vec<IndexLabel> {
    let mut closed: Vec<_> = net.edges().into_values().filter(|e| e.nodes() >= 2).collect();
    closed.shuffle(rng);
    let want = rng.gen_range(0..=max);
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut plan = Vec::new();
    for e in closed {
        if plan.len() == want {
            break;
        }
        if e.endpoints.iter().any(|(id, _)| used.contains(id)) {
            continue;
        }
        used.extend(e.endpoints.iter().map(|(id, _)| id.clone()));
        plan.push(e.label);
    }
    plan
}
