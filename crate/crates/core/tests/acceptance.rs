//! End-to-end acceptance suite. Runs every criterion in sequence (timing
//! checks must not share the machine with other tests) and prints one
//! PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use codedtn::coding::{candidate_schemes, encode};
use codedtn::fixtures::{grid_two_node, hyperedge_pair, plan_network, random_network, uniform_pair};
use codedtn::interpolation::{evaluate, interpolate, EvaluationSet};
use codedtn::oracle::{
    alignment_sweep, brute_force_reference, check_alignment, check_layout, hyper_sweep, mutated_layout,
    symbolic_expand, two_node_sweep, Monomial, Mutation,
};
use codedtn::simulator::{build_pool, run_experiment, FailurePattern};
use codedtn::{
    plan_best, Axis, CodeScheme, ComplexField, DecodeGeometry, Field, IndexLabel, PrimeField, SchemeKind,
    SliceAssignment, SlicingPlan, Tensor, TensorNetwork,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gf() -> PrimeField {
    PrimeField::mersenne61()
}

fn plan_of(params: &[(usize, usize)]) -> SlicingPlan {
    SlicingPlan::from_params(params).unwrap()
}

fn example_one() -> (TensorNetwork<PrimeField>, CodeScheme) {
    let (net, labels) = grid_two_node(gf(), 2, 11);
    let plan = SlicingPlan::new(&net, &labels).unwrap();
    (net, CodeScheme::new(SchemeKind::TwoNode, &plan).unwrap())
}

fn example_two() -> (TensorNetwork<PrimeField>, CodeScheme) {
    let (net, labels) = hyperedge_pair(gf(), 12);
    let plan = SlicingPlan::new(&net, &labels).unwrap();
    (net, CodeScheme::new(SchemeKind::Hyperedge, &plan).unwrap())
}

fn exhaustive_exact(net: &TensorNetwork<PrimeField>, scheme: &CodeScheme, f: u64, subsets: u64) -> String {
    let report = run_experiment(net, scheme, f, &FailurePattern::adversarial(f)).unwrap();
    assert!(report.exhaustive, "f={f}: expected an exhaustive sweep");
    assert_eq!(report.failure_sets_tested, subsets, "f={f}");
    assert!(report.decode_success, "f={f}: {:?}", report.failure_reason);
    assert_eq!(report.error.as_ref().unwrap().exact_match, Some(true), "f={f}");
    assert!(report.verified && report.formula_check);
    format!("f={f}: {} workers, {} subsets exact", report.workers_provisioned, subsets)
}

fn criterion_1() -> String {
    let (net, scheme) = example_one();
    assert_eq!(scheme.degree(), 22);
    for f in 0..=5u64 {
        assert_eq!(scheme.f_resilient(f).unwrap(), f as u128 + 23);
        assert_eq!(scheme.gain(f).unwrap(), 11 * (f as i128 - 1));
    }
    exhaustive_exact(&net, &scheme, 3, 2600)
}

fn criterion_2() -> String {
    let (net, scheme) = example_two();
    assert_eq!(scheme.degree(), 19);
    for f in 0..=8u64 {
        assert_eq!(scheme.f_resilient(f).unwrap(), f as u128 + 20);
        assert_eq!(scheme.gain(f).unwrap(), 3 * f as i128 - 16);
    }
    let a = exhaustive_exact(&net, &scheme, 1, 21);
    let b = exhaustive_exact(&net, &scheme, 2, 231);
    format!("{a}; {b}")
}

fn criterion_3() -> String {
    for l in 2..=8usize {
        let scheme = CodeScheme::new(SchemeKind::TwoNode, &plan_of(&[(2, l)])).unwrap();
        for f in 0..=6u64 {
            assert_eq!(scheme.f_resilient(f).unwrap(), (f + 2 * l as u64 - 1) as u128);
        }
        let layout = scheme.layout().unwrap();
        let forward: Vec<u64> = (0..l as u64).collect();
        let reversed: Vec<u64> = (0..l as u64).rev().collect();
        assert_eq!(layout.indices[0].exponents, vec![forward, reversed]);
        assert_eq!(layout.target, DecodeGeometry::Aligned { exponent: l as u64 - 1 });
        let poly = symbolic_expand(&scheme).unwrap();
        let at_target: BTreeSet<Monomial> = poly.at(l as u64 - 1).unwrap().keys().cloned().collect();
        let diagonal: BTreeSet<Monomial> = (1..=l).map(|s| Monomial::diagonal(&layout, &[s])).collect();
        assert_eq!(at_target, diagonal, "L={l}");
        assert!(check_alignment(&scheme).unwrap().passed());
    }
    "L=2..8 match f+2L-1 with target x^(L-1)".into()
}

fn criterion_4() -> String {
    for l in [2usize, 3] {
        for n in 1..=3u32 {
            let params = vec![(2, l); n as usize];
            let scheme = CodeScheme::new(SchemeKind::TwoNode, &plan_of(&params)).unwrap();
            for f in 0..=6u64 {
                let expected = f + 2 * (l as u64).pow(n) - 1;
                assert_eq!(scheme.f_resilient(f).unwrap(), expected as u128, "L={l} n={n} f={f}");
            }
        }
    }
    "L in {2,3}, n in {1,2,3}".into()
}

/// Closed-form worker counts for every scheme whose preconditions hold.
fn closed_forms(params: &[(usize, usize)], f: u64) -> Vec<(SchemeKind, u64)> {
    let n_part: u64 = params.iter().map(|(_, l)| *l as u64).product();
    let span = |m: usize, l: usize| ((m as u64).pow(l as u32) - 1) / (m as u64 - 1);
    let mut out = vec![(SchemeKind::NaiveReplication, n_part * (f + 1))];
    out.push((
        SchemeKind::Hyperedge,
        f + params.iter().map(|(m, l)| span(*m, *l)).product::<u64>(),
    ));
    if params.iter().all(|(m, _)| *m == 2) {
        out.push((SchemeKind::TwoNode, f + 2 * n_part - 1));
    }
    let two: u64 = params.iter().filter(|(m, _)| *m == 2).map(|(_, l)| *l as u64).product();
    let rest: u64 = params.iter().filter(|(m, _)| *m != 2).map(|(_, l)| *l as u64).product();
    if params.iter().any(|(m, _)| *m == 2) {
        out.push((SchemeKind::PartialTwoNode, rest * (f + 2 * two - 1)));
    }
    if params.len() >= 2 {
        let (pos, (m1, l1)) = params
            .iter()
            .enumerate()
            .min_by_key(|(p, (m, _))| (*m, *p))
            .unwrap();
        let others: u64 = params
            .iter()
            .enumerate()
            .filter(|(p, _)| *p != pos)
            .map(|(_, (_, l))| *l as u64)
            .product();
        out.push((SchemeKind::PartialOneIndex, others * (f + span(*m1, *l1))));
    }
    out
}

fn criterion_5() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut plans: Vec<Vec<(usize, usize)>> = vec![vec![(2, 2), (3, 2)]];
    while plans.len() < 50 {
        let n = rng.gen_range(2..=4);
        let mut params: Vec<(usize, usize)> = (0..n)
            .map(|_| (if rng.gen_bool(0.5) { 2 } else { rng.gen_range(3..=4) }, rng.gen_range(1..=4)))
            .collect();
        params[0].0 = 2;
        params[1].0 = rng.gen_range(3..=4);
        let len = params.len();
        params.swap(0, rng.gen_range(0..len));
        plans.push(params);
    }
    let mut checked = 0;
    for params in &plans {
        let plan = plan_of(params);
        for f in 0..=6u64 {
            let best = plan_best(&plan, f).unwrap();
            let got = best.f_resilient(f).unwrap() as u64;
            let enumerated = SchemeKind::ALL
                .iter()
                .filter_map(|k| CodeScheme::new(*k, &plan).ok())
                .map(|s| s.f_resilient(f).unwrap() as u64)
                .min()
                .unwrap();
            assert_eq!(got, enumerated, "{params:?} f={f}");
            let forms = closed_forms(params, f);
            let closed_form_min = forms.iter().map(|(_, w)| *w).min().unwrap();
            assert_eq!(got, closed_form_min, "{params:?} f={f}");
            for (kind, w) in &forms {
                let s = CodeScheme::new(*kind, &plan).unwrap();
                assert_eq!(s.f_resilient(f).unwrap() as u64, *w, "{kind} {params:?} f={f}");
            }
            checked += 1;
        }
    }
    let p = plan_of(&[(2, 2), (3, 2)]);
    let best = plan_best(&p, 2).unwrap();
    assert_eq!(best.kind(), SchemeKind::PartialTwoNode);
    assert_eq!(best.f_resilient(2).unwrap(), 10);
    assert_eq!(CodeScheme::new(SchemeKind::Hyperedge, &p).unwrap().f_resilient(2).unwrap(), 14);
    assert_eq!(plan_best(&plan_of(&[(3, 2), (4, 2)]), 2).unwrap().kind(), SchemeKind::NaiveReplication);
    format!("{} plans x f=0..6 ({checked} cells); ((2,2),(3,2)) f=2 -> 10 vs 14", plans.len())
}

fn slice_sum<F: Field>(net: &TensorNetwork<F>, labels: &[IndexLabel]) -> Tensor<F> {
    let plan = SlicingPlan::new(net, labels).unwrap();
    let mut acc: Option<Tensor<F>> = None;
    for a in plan.assignments() {
        let part = net.slice(&plan, &a).unwrap().full_contract(None).unwrap();
        acc = Some(match acc {
            None => part,
            Some(t) => t.add(&part).unwrap(),
        });
    }
    acc.unwrap()
}

fn criterion_6() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sliced = 0;
    for _ in 0..200 {
        let (net, plan) = random_network(gf(), &mut rng, 8, 4, 3);
        let full = net.full_contract(None).unwrap();
        assert_eq!(slice_sum(&net, &plan), full);
        assert_eq!(brute_force_reference(&net).unwrap(), full);
        sliced += plan.len();
    }
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (net, plan) = random_network(ComplexField, &mut rng, 8, 4, 3);
        let full = net.full_contract(None).unwrap();
        let scale = full.data().iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        for other in [slice_sum(&net, &plan), brute_force_reference(&net).unwrap()] {
            for (a, b) in other.data().iter().zip(full.data()) {
                worst = worst.max((a - b).norm() / scale);
            }
        }
    }
    assert!(worst <= 1e-9, "complex relative error {worst}");
    format!("200 GF exact ({sliced} sliced labels), 200 c128 max rel err {worst:.1e}")
}

fn criterion_7() -> String {
    let two = two_node_sweep(3, 32);
    let hyper = hyper_sweep(2..=5, 1..=5, 3, 256);
    let rows_two = alignment_sweep(SchemeKind::TwoNode, &two).unwrap();
    let rows_hyper = alignment_sweep(SchemeKind::Hyperedge, &hyper).unwrap();
    for row in rows_two.iter().chain(&rows_hyper) {
        assert!(row.result.passed(), "{} {}: {}", row.scheme, row.plan, row.result);
    }
    let mut mutants = 0;
    for (kind, plans) in [(SchemeKind::TwoNode, &two), (SchemeKind::Hyperedge, &hyper)] {
        for p in plans.iter() {
            let scheme = CodeScheme::new(kind, p).unwrap();
            let strides = scheme.strides().unwrap();
            for (i, idx) in scheme.coded_indices().iter().enumerate() {
                if idx.dim < 2 {
                    continue;
                }
                for delta in [-1i64, 1] {
                    if delta < 0 && strides[i] == 0 {
                        continue;
                    }
                    let layout = mutated_layout(&scheme, &Mutation::Stride { index: i, delta }).unwrap();
                    assert!(!check_layout(&layout).unwrap().passed(), "{kind} {p} stride {i}{delta:+}");
                    mutants += 1;
                }
            }
        }
    }
    format!(
        "{} 2-node and {} hyperedge plans pass; {mutants} stride mutants fail",
        rows_two.len(),
        rows_hyper.len()
    )
}

fn criterion_8() -> String {
    let mut notes = Vec::new();
    for (name, (net, scheme), f) in [
        ("2node", example_one(), 3u64),
        ("hyper", example_two(), 1),
        ("hyper", example_two(), 2),
    ] {
        let pool = build_pool(&net, &scheme, f).unwrap();
        let victims: Vec<usize> = pool.group_members(0)[..f as usize + 1].to_vec();
        let report = run_experiment(&net, &scheme, f, &FailurePattern::explicit(victims)).unwrap();
        assert!(!report.decode_success, "{name} f={f} survived f+1 failures");
        assert!(report.failure_reason.as_deref().unwrap().contains("resilience exceeded"));
        let ok = run_experiment(
            &net,
            &scheme,
            f,
            &FailurePattern::explicit(pool.group_members(0)[..f as usize].to_vec()),
        )
        .unwrap();
        assert!(ok.verified);
        notes.push(format!("{name} f={f}"));
    }
    format!("f+1 failures defeat {}", notes.join(", "))
}

fn criterion_9() -> String {
    let f = gf();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cases = 0;
    for d in (0..=64usize).step_by(4).chain([1, 22, 63]) {
        let axes = vec![Axis::new("u", 2), Axis::new("v", 3)];
        let coeffs: Vec<Tensor<PrimeField>> = (0..=d)
            .map(|_| Tensor::from_fn(f, axes.clone(), |_| rng.gen_range(0..f.modulus())).unwrap())
            .collect();
        let points = f.evaluation_points(d + 6).unwrap();
        let values: Vec<_> = points.iter().map(|x| evaluate(&coeffs, *x).unwrap()).collect();
        for _ in 0..10 {
            let mut idx: Vec<usize> = (0..d + 6).collect();
            for i in (1..idx.len()).rev() {
                idx.swap(i, rng.gen_range(0..=i));
            }
            idx.truncate(d + 1);
            let ev = EvaluationSet::new(
                f,
                idx.iter().map(|&i| points[i]).collect(),
                idx.iter().map(|&i| values[i].clone()).collect(),
                d,
            )
            .unwrap();
            assert_eq!(interpolate(&ev).unwrap(), coeffs, "d={d}");
            cases += 1;
        }
    }
    format!("{cases} subset recoveries exact, d up to 64")
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// Seconds per call of `op`, with enough repetitions to pass `floor`.
fn time_per_call(floor: Duration, mut op: impl FnMut()) -> f64 {
    let mut reps = 1u32;
    loop {
        let t = Instant::now();
        for _ in 0..reps {
            op();
        }
        let e = t.elapsed();
        if e >= floor {
            return e.as_secs_f64() / reps as f64;
        }
        reps *= 2;
    }
}

fn criterion_10() -> String {
    let mut compared = 0;
    let nets: Vec<(TensorNetwork<PrimeField>, Vec<IndexLabel>)> = vec![
        grid_two_node(gf(), 2, 11),
        hyperedge_pair(gf(), 12),
        (plan_network(gf(), &[(2, 2), (3, 2), (2, 3)], 2, 3), ["s1", "s2", "s3"].map(IndexLabel::from).to_vec()),
    ];
    for (net, labels) in &nets {
        let plan = SlicingPlan::new(net, labels).unwrap();
        for scheme in candidate_schemes(&plan) {
            let points = gf().evaluation_points(3).unwrap();
            for group in scheme.group_assignments() {
                let coded: Vec<usize> = vec![1; scheme.coded_indices().len()];
                let full = scheme.full_assignment(&group, &SliceAssignment(coded));
                let sliced = net.slice(scheme.plan(), &full).unwrap();
                for x in &points {
                    let enc = encode(net, &scheme, *x, &group).unwrap();
                    assert_eq!(enc.network.topology_fingerprint(), sliced.topology_fingerprint());
                    compared += 1;
                }
            }
        }
    }

    let (net, labels) = grid_two_node(gf(), 8, 21);
    let plan = SlicingPlan::new(&net, &labels).unwrap();
    let scheme = CodeScheme::new(SchemeKind::TwoNode, &plan).unwrap();
    let sliced = net.slice(&plan, &SliceAssignment(vec![2, 3])).unwrap();
    let x = gf().evaluation_points(17).unwrap()[16];
    let encoded = encode(&net, &scheme, x, &SliceAssignment(vec![])).unwrap().network;
    let floor = Duration::from_millis(15);
    let time_sliced = || time_per_call(floor, || drop(sliced.full_contract(None).unwrap()));
    let time_encoded = || time_per_call(floor, || drop(encoded.full_contract(None).unwrap()));
    time_sliced();
    time_encoded();
    // Paired, alternating rounds: slow drift in machine speed cancels in each ratio.
    let mut ratios = Vec::new();
    let mut ts = Vec::new();
    for round in 0..31 {
        let (a, b) = if round % 2 == 0 {
            let a = time_sliced();
            (a, time_encoded())
        } else {
            let b = time_encoded();
            (time_sliced(), b)
        };
        ts.push(a);
        ratios.push(b / a);
    }
    let ratio = median(ratios);
    let diff = (ratio - 1.0).abs();
    assert!(diff < 0.10, "encoded/sliced time ratio {ratio:.3}");
    format!(
        "{compared} fingerprint pairs equal; sliced contraction {:.1}us, encoded/sliced ratio {ratio:.3}",
        median(ts) * 1e6
    )
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn criterion_11() -> String {
    let k = 3;
    let dims = [4usize, 6, 8, 10, 12, 14, 16];
    let floor = Duration::from_millis(20);
    let mut log_l = Vec::new();
    let mut log_enc = Vec::new();
    let mut log_con = Vec::new();
    for &l in &dims {
        let net = uniform_pair(gf(), k, l, l as u64);
        let plan = SlicingPlan::new(&net, &[IndexLabel::from("s")]).unwrap();
        let scheme = CodeScheme::new(SchemeKind::TwoNode, &plan).unwrap();
        let x = 7u64;
        let group = SliceAssignment(vec![]);
        let mut enc = Vec::new();
        let mut con = Vec::new();
        for _ in 0..5 {
            enc.push(time_per_call(floor, || drop(encode(&net, &scheme, x, &group).unwrap())));
            con.push(time_per_call(floor, || drop(net.full_contract(None).unwrap())));
        }
        log_l.push((l as f64).ln());
        log_enc.push(median(enc).ln());
        log_con.push(median(con).ln());
    }
    let se = slope(&log_l, &log_enc);
    let sc = slope(&log_l, &log_con);
    assert!(sc - se >= 0.8, "encode slope {se:.2}, contraction slope {sc:.2}");
    format!("log-log slopes: encode {se:.2}, edge contraction {sc:.2} (diff {:.2})", sc - se)
}

fn main() {
    let criteria: [(&str, fn() -> String); 11] = [
        ("first worked example (2-node, L=(4,3))", criterion_1),
        ("second worked example (hyperedge, (3,2),(4,2))", criterion_2),
        ("single 2-node index as a dot-product code", criterion_3),
        ("uniform 2-node worker count f+2L^n-1", criterion_4),
        ("partial-coding planner", criterion_5),
        ("slice-sum identity", criterion_6),
        ("coefficient alignment and stride mutations", criterion_7),
        ("tightness probe", criterion_8),
        ("interpolation round trip", criterion_9),
        ("topology and cost of encoded partitions", criterion_10),
        ("encoding cost asymptotics", criterion_11),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} [{secs:.2}s] {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL criterion {:>2}: {name} [{secs:.2}s] {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
