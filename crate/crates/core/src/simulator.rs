//! In-process master/worker harness: provision a pool for a scheme, knock out
//! workers, contract the survivors in parallel and decode.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{check_applicable, encode_with_layout, CodeScheme, SchemeKind};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::interpolation::{interpolate_selected, EvaluationSet};
use crate::network::{SliceAssignment, TensorNetwork};
use crate::tensor::Tensor;

/// Largest number of failure subsets tried one by one.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;
/// Random subsets drawn when the exhaustive count is over the limit.
pub const FALLBACK_SAMPLES: usize = 1_000;
/// Largest pool the simulator will build.
pub const MAX_POOL: u128 = 1_000_000;
/// Relative tolerance for the floating-point backends.
pub const FLOAT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct WorkerJob<F: Field> {
    pub id: usize,
    /// Position of the group in [`CodeScheme::group_assignments`] order.
    pub group: usize,
    /// `None` for replicated (uncoded) jobs.
    pub point: Option<F::Elem>,
    pub network: TensorNetwork<F>,
}

/// All jobs for one scheme, sized to survive `f` failures.
#[derive(Clone, Debug)]
pub struct Pool<F: Field> {
    pub scheme: CodeScheme,
    pub f: u64,
    pub groups: Vec<SliceAssignment>,
    pub jobs: Vec<WorkerJob<F>>,
}

impl<F: Field> Pool<F> {
    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Survivors needed per group.
    pub fn needed_per_group(&self) -> usize {
        self.scheme.degree() as usize + 1
    }

    /// Worker ids of group `g`, ascending.
    pub fn group_members(&self, g: usize) -> Vec<usize> {
        self.jobs.iter().filter(|j| j.group == g).map(|j| j.id).collect()
    }
}

/// Builds the worker pool. Coded schemes get `d + f + 1` jobs per group at
/// distinct evaluation points; replication gets `f + 1` copies of each slice.
pub fn build_pool<F: Field>(net: &TensorNetwork<F>, scheme: &CodeScheme, f: u64) -> Result<Pool<F>> {
    check_applicable(net, scheme)?;
    let total = scheme.f_resilient(f)?;
    if total > MAX_POOL {
        return Err(Error::GuardExceeded {
            what: "worker pool",
            size: total,
            limit: MAX_POOL,
        });
    }
    let field = net.field();
    let per_group = scheme.workers_per_group(f) as usize;
    let coded = scheme.kind().is_coded();
    let points = if coded {
        Some(field.evaluation_points(per_group)?)
    } else {
        None
    };
    let layout = scheme.layout()?;
    let groups: Vec<SliceAssignment> = scheme.group_assignments().collect();

    let specs: Vec<(usize, usize, Option<F::Elem>)> = (0..groups.len())
        .flat_map(|g| {
            let points = points.as_ref();
            (0..per_group).map(move |w| (g, w, points.map(|p| p[w])))
        })
        .collect();
    let networks = specs
        .par_iter()
        .map(|(g, _, point)| {
            let x = point.unwrap_or_else(|| field.one());
            encode_with_layout(net, scheme, &layout, x, &groups[*g]).map(|e| e.network)
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs = specs
        .into_iter()
        .zip(networks)
        .enumerate()
        .map(|(id, ((group, _, point), network))| WorkerJob {
            id,
            group,
            point,
            network,
        })
        .collect();
    Ok(Pool {
        scheme: scheme.clone(),
        f,
        groups,
        jobs,
    })
}

/// Results of the workers that did not fail, keyed by worker id.
pub type Survivors<F> = BTreeMap<usize, Tensor<F>>;

/// Contracts every job not in `failed`, in parallel.
pub fn run<F: Field>(pool: &Pool<F>, failed: &BTreeSet<usize>) -> Result<Survivors<F>> {
    let results = pool
        .jobs
        .par_iter()
        .filter(|j| !failed.contains(&j.id))
        .map(|j| j.network.full_contract(None).map(|t| (j.id, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(results.into_iter().collect())
}

/// Recovers the full contraction from the survivors, using the lowest worker
/// ids of each group.
pub fn decode<F: Field>(pool: &Pool<F>, survivors: &Survivors<F>) -> Result<Tensor<F>> {
    decode_masked(pool, survivors, &BTreeSet::new())
}

fn decode_masked<F: Field>(pool: &Pool<F>, results: &Survivors<F>, failed: &BTreeSet<usize>) -> Result<Tensor<F>> {
    let needed = pool.needed_per_group();
    let field = pool.jobs.first().map(|j| j.network.field());
    let geometry = pool.scheme.desired_positions()?;
    let exponents = geometry.exponents();
    let mut total: Option<Tensor<F>> = None;
    for g in 0..pool.groups.len() {
        let mut used = Vec::with_capacity(needed);
        let mut available = 0usize;
        for j in pool.jobs.iter().filter(|j| j.group == g) {
            if failed.contains(&j.id) {
                continue;
            }
            if let Some(r) = results.get(&j.id) {
                available += 1;
                if used.len() < needed {
                    used.push((j, r));
                }
            }
        }
        if used.len() < needed {
            return Err(Error::ResilienceExceeded {
                group: g,
                survivors: available,
                needed,
            });
        }
        let part = if pool.scheme.kind() == SchemeKind::NaiveReplication {
            used[0].1.clone()
        } else {
            let points = used.iter().map(|(j, _)| j.point.expect("coded job has a point")).collect();
            let values = used.iter().map(|(_, r)| (*r).clone()).collect();
            let field = field.expect("non-empty pool");
            let ev = EvaluationSet::new(field, points, values, needed - 1)?;
            let coeffs = interpolate_selected(&ev, &exponents)?;
            let mut acc = coeffs[0].clone();
            for c in &coeffs[1..] {
                acc = acc.add(c)?;
            }
            acc
        };
        total = Some(match total {
            None => part,
            Some(t) => t.add(&part)?,
        });
    }
    total.ok_or_else(|| Error::Shape("pool has no groups".into()))
}

/// How failed workers are chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureMode {
    /// Every subset of `count` workers (sampled beyond the guard).
    AdversarialExhaustive,
    /// One subset of `count` workers drawn from the seed.
    Random { seed: u64 },
    /// These workers fail; `count` must equal the list length.
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailurePattern {
    pub mode: FailureMode,
    pub count: u64,
}

impl FailurePattern {
    pub fn adversarial(count: u64) -> Self {
        FailurePattern {
            mode: FailureMode::AdversarialExhaustive,
            count,
        }
    }

    pub fn random(count: u64, seed: u64) -> Self {
        FailurePattern {
            mode: FailureMode::Random { seed },
            count,
        }
    }

    pub fn explicit(ids: Vec<usize>) -> Self {
        FailurePattern {
            count: ids.len() as u64,
            mode: FailureMode::Explicit(ids),
        }
    }
}

impl fmt::Display for FailurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mode {
            FailureMode::AdversarialExhaustive => write!(f, "adversarial"),
            FailureMode::Random { seed } => write!(f, "random(seed={seed})"),
            FailureMode::Explicit(ids) => {
                let parts: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

fn random_subset(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut v = sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

/// The failure subsets a pattern stands for, and whether they cover every
/// subset of that size.
pub fn failure_sets<F: Field>(pool: &Pool<F>, pattern: &FailurePattern) -> Result<(Vec<Vec<usize>>, bool)> {
    let n = pool.len();
    let k = pattern.count as usize;
    if k > n {
        return Err(Error::InvalidFailurePattern(format!(
            "{k} failures requested from a pool of {n}"
        )));
    }
    match &pattern.mode {
        FailureMode::Explicit(ids) => {
            if ids.len() != k {
                return Err(Error::InvalidFailurePattern(format!(
                    "{} ids listed for {k} failures",
                    ids.len()
                )));
            }
            let set: BTreeSet<usize> = ids.iter().copied().collect();
            if set.len() != ids.len() {
                return Err(Error::InvalidFailurePattern("repeated worker id".into()));
            }
            if let Some(bad) = set.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidFailurePattern(format!(
                    "worker {bad} does not exist (pool has {n})"
                )));
            }
            Ok((vec![set.into_iter().collect()], k == 0))
        }
        FailureMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok((vec![random_subset(n, k, &mut rng)], k == 0))
        }
        FailureMode::AdversarialExhaustive => {
            if binomial(n as u64, k as u64) <= EXHAUSTIVE_LIMIT {
                return Ok((combinations(n, k), true));
            }
            let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
            for g in 0..pool.groups.len() {
                let members = pool.group_members(g);
                if members.len() >= k {
                    sets.insert(members[..k].to_vec());
                    sets.insert(members[members.len() - k..].to_vec());
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..FALLBACK_SAMPLES {
                sets.insert(random_subset(n, k, &mut rng));
            }
            Ok((sets.into_iter().collect(), false))
        }
    }
}

/// Comparison of a decoded tensor against the reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetric {
    pub max_abs: f64,
    /// `max_abs` over the largest reference magnitude.
    pub max_rel: f64,
    /// Set for exact fields only.
    pub exact_match: Option<bool>,
}

impl ErrorMetric {
    pub fn compare<F: Field>(got: &Tensor<F>, reference: &Tensor<F>) -> Result<Self> {
        if got.axes() != reference.axes() {
            return Err(Error::Shape("decoded tensor and reference differ in shape".into()));
        }
        let f = reference.field();
        let mut max_abs = 0.0f64;
        let mut scale = 0.0f64;
        for (a, b) in got.data().iter().zip(reference.data()) {
            max_abs = max_abs.max(f.distance(*a, *b));
            scale = scale.max(f.magnitude(*b));
        }
        let max_rel = if scale > 0.0 { max_abs / scale } else { max_abs };
        let exact_match = f.is_exact().then(|| got.data() == reference.data());
        Ok(ErrorMetric {
            max_abs,
            max_rel,
            exact_match,
        })
    }

    pub fn within(&self, tolerance: f64) -> bool {
        match self.exact_match {
            Some(e) => e,
            None => self.max_rel <= tolerance,
        }
    }

    fn worst(self, other: ErrorMetric) -> ErrorMetric {
        ErrorMetric {
            max_abs: self.max_abs.max(other.max_abs),
            max_rel: self.max_rel.max(other.max_rel),
            exact_match: match (self.exact_match, other.exact_match) {
                (Some(a), Some(b)) => Some(a && b),
                _ => None,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub build_ms: f64,
    pub run_ms: f64,
    pub decode_ms: f64,
    pub reference_ms: f64,
}

/// Outcome of one experiment. Everything except `timings` is deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scheme: SchemeKind,
    /// `m:L` pairs in coded-first order.
    pub plan: String,
    pub plan_labels: Vec<String>,
    pub field: String,
    pub partitions: u64,
    pub f: u64,
    pub degree: u64,
    pub groups: u64,
    pub workers_per_group: u64,
    pub workers_provisioned: u64,
    pub f_resilient: u64,
    pub formula_check: bool,
    pub naive_workers: u64,
    pub gain: i64,
    pub failure_mode: String,
    pub workers_failed: u64,
    /// The single failed set, or the first one that broke decoding.
    pub failed_ids: Vec<usize>,
    pub failure_sets_tested: u64,
    pub exhaustive: bool,
    /// Fewest survivors seen in each group over all tested sets.
    pub survivors_per_group: Vec<usize>,
    pub decode_success: bool,
    pub failure_reason: Option<String>,
    pub error: Option<ErrorMetric>,
    pub tolerance: Option<f64>,
    pub verified: bool,
    pub timings: PhaseTimings,
}

impl SimulationReport {
    /// Copy with wall-clock fields zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Self {
        SimulationReport {
            timings: PhaseTimings::default(),
            ..self.clone()
        }
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn to_u64(v: u128, what: &'static str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::Overflow(what))
}

/// Builds the pool, applies the failure pattern, decodes and checks the
/// result against a direct contraction of `net`. Decoding failures are
/// reported in the returned report rather than as errors.
pub fn run_experiment<F: Field>(
    net: &TensorNetwork<F>,
    scheme: &CodeScheme,
    f: u64,
    pattern: &FailurePattern,
) -> Result<SimulationReport> {
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let pool = build_pool(net, scheme, f)?;
    timings.build_ms = ms(t);
    let (sets, exhaustive) = failure_sets(&pool, pattern)?;

    let t = Instant::now();
    let single = sets.len() == 1;
    let results = if single {
        run(&pool, &sets[0].iter().copied().collect())?
    } else {
        run(&pool, &BTreeSet::new())?
    };
    timings.run_ms = ms(t);

    let t = Instant::now();
    let reference = net.full_contract(None)?;
    timings.reference_ms = ms(t);

    let field = net.field();
    let tolerance = (!field.is_exact()).then_some(FLOAT_TOLERANCE);
    let tol = tolerance.unwrap_or(0.0);

    let t = Instant::now();
    let outcomes: Vec<Result<ErrorMetric>> = sets
        .par_iter()
        .map(|set| {
            let failed: BTreeSet<usize> = set.iter().copied().collect();
            let decoded = decode_masked(&pool, &results, &failed)?;
            ErrorMetric::compare(&decoded, &reference)
        })
        .collect();
    timings.decode_ms = ms(t);

    let mut survivors_per_group = vec![usize::MAX; pool.groups.len()];
    for set in &sets {
        for (g, slot) in survivors_per_group.iter_mut().enumerate() {
            let alive = pool
                .jobs
                .iter()
                .filter(|j| j.group == g && set.binary_search(&j.id).is_err())
                .count();
            *slot = (*slot).min(alive);
        }
    }

    let mut error: Option<ErrorMetric> = None;
    let mut failure_reason = None;
    let mut failed_ids = if single { sets[0].clone() } else { Vec::new() };
    let mut verified = true;
    for (set, outcome) in sets.iter().zip(outcomes) {
        match outcome {
            Ok(metric) => {
                if !metric.within(tol) && verified {
                    verified = false;
                    failed_ids = set.clone();
                }
                error = Some(match error {
                    None => metric,
                    Some(e) => e.worst(metric),
                });
            }
            Err(e) => {
                failed_ids = set.clone();
                failure_reason = Some(e.to_string());
                error = None;
                verified = false;
                break;
            }
        }
    }
    let decode_success = failure_reason.is_none();

    let provisioned = pool.len() as u64;
    let f_resilient = to_u64(scheme.f_resilient(f)?, "worker count")?;
    let partitions = scheme.partitions()?;
    let naive_workers = partitions
        .checked_mul(f + 1)
        .ok_or(Error::Overflow("worker count"))?;
    Ok(SimulationReport {
        scheme: scheme.kind(),
        plan: scheme.plan().to_string(),
        plan_labels: scheme.plan().labels().iter().map(|l| l.to_string()).collect(),
        field: field.kind().to_string(),
        partitions,
        f,
        degree: scheme.degree(),
        groups: scheme.groups()?,
        workers_per_group: to_u64(scheme.workers_per_group(f), "worker count")?,
        workers_provisioned: provisioned,
        f_resilient,
        formula_check: provisioned == f_resilient,
        naive_workers,
        gain: i64::try_from(scheme.gain(f)?).map_err(|_| Error::Overflow("gain"))?,
        failure_mode: pattern.to_string(),
        workers_failed: pattern.count,
        failed_ids,
        failure_sets_tested: sets.len() as u64,
        exhaustive,
        survivors_per_group,
        decode_success,
        failure_reason,
        error,
        tolerance,
        verified: decode_success && verified,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(26, 3), 2600);
        assert_eq!(binomial(21, 1), 21);
        assert_eq!(binomial(22, 2), 231);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u128::MAX);
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        let all = combinations(5, 2);
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[9], vec![3, 4]);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(26, 3).len(), 2600);
    }
}
