//! Reference engines that share no code path with the contraction kernel or
//! the interpolation decoder.
//!
//! [`brute_force_reference`] evaluates a network by summing over every joint
//! index assignment. [`symbolic_expand`] and [`check_layout`] expand the
//! product of the encoding polynomials over formal slice symbols, so a
//! coefficient claim cannot pass through numeric cancellation.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{hyper_span, CodeLayout, CodeScheme, DecodeGeometry, SchemeKind};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::network::{SlicingPlan, TensorNetwork};
use crate::tensor::{Axis, IndexLabel, Tensor};

/// Largest joint assignment space the brute-force evaluator walks.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;
/// Largest output degree the formal expansion accepts.
pub const SYMBOLIC_DEGREE_LIMIT: u64 = 4096;
/// Largest number of formal terms [`symbolic_expand`] materializes.
pub const SYMBOLIC_TERM_LIMIT: u128 = 2_000_000;

/// Full contraction by direct summation over every index assignment.
pub fn brute_force_reference<F: Field>(net: &TensorNetwork<F>) -> Result<Tensor<F>> {
    net.validate(&[]).into_result()?;
    let field = net.field();
    let edges = net.edges();
    let labels: Vec<&IndexLabel> = edges.keys().collect();
    let dims: Vec<usize> = edges.values().map(|e| e.dim).collect();
    let space = dims.iter().fold(1u128, |acc, d| acc.saturating_mul(*d as u128));
    if space > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "brute-force assignment space",
            size: space,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let slot = |l: &IndexLabel| labels.iter().position(|x| *x == l).expect("label present");

    // Per tensor: (global slot, row-major stride) for each axis.
    let tensors: Vec<(&Tensor<F>, Vec<(usize, usize)>)> = net
        .tensors()
        .values()
        .map(|t| {
            let mut stride = 1usize;
            let mut map: Vec<(usize, usize)> = Vec::with_capacity(t.rank());
            for a in t.axes().iter().rev() {
                map.push((slot(&a.label), stride));
                stride *= a.dim;
            }
            (t, map)
        })
        .collect();

    let open: Vec<(usize, &IndexLabel)> = edges
        .values()
        .filter(|e| e.is_open())
        .map(|e| (slot(&e.label), &e.label))
        .collect();
    let out_axes: Vec<Axis> = open.iter().map(|(s, l)| Axis::new((*l).clone(), dims[*s])).collect();
    let out_len: usize = out_axes.iter().map(|a| a.dim).product();
    let mut out = vec![field.zero(); out_len];

    let mut idx = vec![0usize; dims.len()];
    loop {
        let mut prod = field.one();
        for (t, map) in &tensors {
            let offset: usize = map.iter().map(|(s, st)| idx[*s] * st).sum();
            prod = field.mul(prod, t.data()[offset]);
        }
        let mut o = 0usize;
        for (s, _) in &open {
            o = o * dims[*s] + idx[*s];
        }
        out[o] = field.add(out[o], prod);

        let mut k = dims.len();
        loop {
            if k == 0 {
                let result = if out_axes.is_empty() {
                    Tensor::scalar(field, out[0])
                } else {
                    Tensor::new(field, out_axes, out)?
                };
                return Ok(result);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// One formal product: for every coded index and endpoint, the chosen slice
/// (1-based). `choice[i][r]` belongs to endpoint `r` of index `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<Vec<usize>>);

impl Monomial {
    /// A product where every endpoint of index `i` takes slice `s_i`.
    pub fn diagonal(layout: &CodeLayout, assignment: &[usize]) -> Self {
        Monomial(
            layout
                .indices
                .iter()
                .zip(assignment)
                .map(|(c, s)| vec![*s; c.nodes()])
                .collect(),
        )
    }

    /// True when every endpoint of each index agrees on its slice.
    pub fn is_diagonal(&self) -> bool {
        self.0.iter().all(|r| r.windows(2).all(|w| w[0] == w[1]))
    }

    pub fn render(&self, layout: &CodeLayout) -> String {
        let mut parts = Vec::new();
        for (code, choices) in layout.indices.iter().zip(&self.0) {
            for (r, s) in choices.iter().enumerate() {
                parts.push(format!("{}#{}[{}]", code.label, r + 1, s));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    fn exponent(&self, layout: &CodeLayout) -> u64 {
        layout
            .indices
            .iter()
            .zip(&self.0)
            .map(|(code, choices)| {
                choices
                    .iter()
                    .enumerate()
                    .map(|(r, s)| code.exponents[r][s - 1])
                    .sum::<u64>()
            })
            .sum()
    }
}

/// Product of the encoding polynomials over formal slice symbols:
/// exponent to the multiset of formal products landing there.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicPoly {
    pub terms: BTreeMap<u64, BTreeMap<Monomial, u32>>,
}

impl SymbolicPoly {
    pub fn max_exponent(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn at(&self, exponent: u64) -> Option<&BTreeMap<Monomial, u32>> {
        self.terms.get(&exponent)
    }

    /// Exponents holding `m`.
    pub fn positions_of(&self, m: &Monomial) -> Vec<u64> {
        self.terms
            .iter()
            .filter(|(_, ms)| ms.contains_key(m))
            .map(|(e, _)| *e)
            .collect()
    }

    pub fn term_count(&self) -> u64 {
        self.terms.values().flat_map(|ms| ms.values()).map(|c| *c as u64).sum()
    }
}

fn check_degree(layout: &CodeLayout) -> Result<()> {
    let max = max_exponent_bound(layout);
    if max > SYMBOLIC_DEGREE_LIMIT || layout.degree > SYMBOLIC_DEGREE_LIMIT {
        return Err(Error::GuardExceeded {
            what: "symbolic degree",
            size: max.max(layout.degree) as u128,
            limit: SYMBOLIC_DEGREE_LIMIT as u128,
        });
    }
    Ok(())
}

fn max_exponent_bound(layout: &CodeLayout) -> u64 {
    layout
        .indices
        .iter()
        .flat_map(|c| c.exponents.iter())
        .map(|list| list.iter().copied().max().unwrap_or(0))
        .fold(0u64, |a, b| a.saturating_add(b))
}

/// Materializes every formal product. Guarded on degree and term count.
pub fn expand_layout(layout: &CodeLayout) -> Result<SymbolicPoly> {
    check_degree(layout)?;
    let count = layout
        .indices
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul((c.dim as u128).saturating_pow(c.nodes() as u32)));
    if count > SYMBOLIC_TERM_LIMIT {
        return Err(Error::GuardExceeded {
            what: "symbolic term count",
            size: count,
            limit: SYMBOLIC_TERM_LIMIT,
        });
    }
    let slots: Vec<(usize, usize, usize)> = layout
        .indices
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.nodes()).map(move |r| (i, r, c.dim)))
        .collect();
    let mut choice: Vec<Vec<usize>> = layout.indices.iter().map(|c| vec![1; c.nodes()]).collect();
    let mut poly = SymbolicPoly::default();
    loop {
        let m = Monomial(choice.clone());
        *poly
            .terms
            .entry(m.exponent(layout))
            .or_default()
            .entry(m)
            .or_insert(0) += 1;
        let mut k = slots.len();
        loop {
            if k == 0 {
                return Ok(poly);
            }
            k -= 1;
            let (i, r, dim) = slots[k];
            if choice[i][r] < dim {
                choice[i][r] += 1;
                break;
            }
            choice[i][r] = 1;
        }
    }
}

/// Formal expansion of `scheme`'s group polynomial.
pub fn symbolic_expand(scheme: &CodeScheme) -> Result<SymbolicPoly> {
    expand_layout(&scheme.layout()?)
}

/// Number of formal products at each exponent, without listing them.
fn term_counts(layout: &CodeLayout) -> Vec<u128> {
    let mut counts = vec![1u128];
    for code in &layout.indices {
        for list in &code.exponents {
            let top = counts.len() - 1 + list.iter().copied().max().unwrap_or(0) as usize;
            let mut next = vec![0u128; top + 1];
            for (e, c) in counts.iter().enumerate() {
                if *c == 0 {
                    continue;
                }
                for x in list {
                    let slot = &mut next[e + *x as usize];
                    *slot = slot.saturating_add(*c);
                }
            }
            counts = next;
        }
    }
    counts
}

/// Formal products landing exactly on `exponent`, in lexicographic order,
/// stopping after `limit`.
pub fn terms_at(layout: &CodeLayout, exponent: u64, limit: usize) -> Vec<Monomial> {
    let lists: Vec<(usize, usize, &Vec<u64>)> = layout
        .indices
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.exponents.iter().enumerate().map(move |(r, l)| (i, r, l)))
        .collect();
    // suffix_min[k], suffix_max[k]: reachable range from lists[k..].
    let mut suffix_min = vec![0u64; lists.len() + 1];
    let mut suffix_max = vec![0u64; lists.len() + 1];
    for k in (0..lists.len()).rev() {
        let l = lists[k].2;
        suffix_min[k] = suffix_min[k + 1] + l.iter().copied().min().unwrap_or(0);
        suffix_max[k] = suffix_max[k + 1] + l.iter().copied().max().unwrap_or(0);
    }
    let mut out = Vec::new();
    let mut choice: Vec<Vec<usize>> = layout.indices.iter().map(|c| vec![1; c.nodes()]).collect();

    #[allow(clippy::too_many_arguments)]
    fn walk(
        k: usize,
        remaining: u64,
        lists: &[(usize, usize, &Vec<u64>)],
        lo: &[u64],
        hi: &[u64],
        choice: &mut Vec<Vec<usize>>,
        out: &mut Vec<Monomial>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if k == lists.len() {
            if remaining == 0 {
                out.push(Monomial(choice.clone()));
            }
            return;
        }
        if remaining < lo[k] || remaining > hi[k] {
            return;
        }
        let (i, r, list) = lists[k];
        for (j, e) in list.iter().enumerate() {
            if *e <= remaining {
                choice[i][r] = j + 1;
                walk(k + 1, remaining - e, lists, lo, hi, choice, out, limit);
            }
        }
    }
    walk(0, exponent, &lists, &suffix_min, &suffix_max, &mut choice, &mut out, limit);
    out
}

/// Result of an alignment check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alignment {
    Pass,
    Fail {
        exponent: u64,
        term: String,
        reason: String,
    },
}

impl Alignment {
    pub fn passed(&self) -> bool {
        *self == Alignment::Pass
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alignment::Pass => write!(f, "pass"),
            Alignment::Fail {
                exponent,
                term,
                reason,
            } => write!(f, "fail at x^{exponent}: {reason} ({term})"),
        }
    }
}

fn first_intruder(layout: &CodeLayout, exponent: u64, wanted: &[Monomial]) -> String {
    terms_at(layout, exponent, wanted.len() + 1)
        .into_iter()
        .find(|m| !wanted.contains(m))
        .map(|m| m.render(layout))
        .unwrap_or_else(|| "?".to_string())
}

/// Checks a layout against its stated target: the aligned geometry needs the
/// target exponent to hold exactly the diagonal products; the separated
/// geometry needs each desired product alone at its exponent. In both cases
/// the top exponent must equal the stated degree.
pub fn check_layout(layout: &CodeLayout) -> Result<Alignment> {
    check_degree(layout)?;
    let counts = term_counts(layout);
    let top = counts.iter().rposition(|c| *c > 0).unwrap_or(0) as u64;
    let count_at = |e: u64| counts.get(e as usize).copied().unwrap_or(0);
    let dims: Vec<usize> = layout.indices.iter().map(|c| c.dim).collect();
    let diagonals: Vec<(Vec<usize>, Monomial)> = crate::network::Assignments::new(dims)
        .map(|a| {
            let m = Monomial::diagonal(layout, &a.0);
            (a.0, m)
        })
        .collect();

    match &layout.target {
        DecodeGeometry::Aligned { exponent } => {
            for (_, m) in &diagonals {
                let e = m.exponent(layout);
                if e != *exponent {
                    return Ok(Alignment::Fail {
                        exponent: e,
                        term: m.render(layout),
                        reason: format!("desired product lands off the target x^{exponent}"),
                    });
                }
            }
            let n = diagonals.len() as u128;
            if count_at(*exponent) != n {
                let wanted: Vec<Monomial> = diagonals.iter().map(|(_, m)| m.clone()).collect();
                return Ok(Alignment::Fail {
                    exponent: *exponent,
                    term: first_intruder(layout, *exponent, &wanted),
                    reason: format!(
                        "target holds {} products, expected {}",
                        count_at(*exponent),
                        n
                    ),
                });
            }
        }
        DecodeGeometry::Separated { positions } => {
            let predicted: BTreeMap<Vec<usize>, u64> =
                positions.iter().map(|(a, e)| (a.0.clone(), *e)).collect();
            for (a, m) in &diagonals {
                let e = m.exponent(layout);
                let want = predicted.get(a).copied();
                if want != Some(e) {
                    return Ok(Alignment::Fail {
                        exponent: e,
                        term: m.render(layout),
                        reason: format!("desired product expected at {want:?}"),
                    });
                }
                if count_at(e) != 1 {
                    return Ok(Alignment::Fail {
                        exponent: e,
                        term: first_intruder(layout, e, std::slice::from_ref(m)),
                        reason: format!("desired product shares x^{e} with {} others", count_at(e) - 1),
                    });
                }
            }
        }
    }
    if top != layout.degree {
        return Ok(Alignment::Fail {
            exponent: top,
            term: terms_at(layout, top, 1)
                .first()
                .map(|m| m.render(layout))
                .unwrap_or_default(),
            reason: format!("top exponent {top} differs from degree {}", layout.degree),
        });
    }
    Ok(Alignment::Pass)
}

/// Alignment check for a scheme's own layout.
pub fn check_alignment(scheme: &CodeScheme) -> Result<Alignment> {
    check_layout(&scheme.layout()?)
}

/// A single-parameter corruption of a layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    /// Shift the stride of coded index `index` by `delta`.
    Stride { index: usize, delta: i64 },
    /// Add one to a single template exponent.
    Exponent { index: usize, endpoint: usize, slice: usize },
}

/// Every mutation that touches an index with more than one slice. Strides
/// never drop below zero.
pub fn mutations(scheme: &CodeScheme) -> Result<Vec<Mutation>> {
    let strides = scheme.strides()?;
    let layout = scheme.layout()?;
    let mut out = Vec::new();
    for (i, code) in layout.indices.iter().enumerate() {
        if code.dim < 2 {
            continue;
        }
        out.push(Mutation::Stride { index: i, delta: 1 });
        if strides[i] >= 1 {
            out.push(Mutation::Stride { index: i, delta: -1 });
        }
        for r in 0..code.nodes() {
            for s in 0..code.dim {
                out.push(Mutation::Exponent {
                    index: i,
                    endpoint: r,
                    slice: s,
                });
            }
        }
    }
    Ok(out)
}

/// The scheme's layout with one mutation applied; degree and target keep
/// their closed-form values.
pub fn mutated_layout(scheme: &CodeScheme, mutation: &Mutation) -> Result<CodeLayout> {
    match mutation {
        Mutation::Stride { index, delta } => {
            let mut strides = scheme.strides()?;
            let s = strides
                .get_mut(*index)
                .ok_or_else(|| Error::Shape(format!("no coded index {index}")))?;
            *s = s
                .checked_add_signed(*delta)
                .ok_or(Error::Overflow("mutated stride"))?;
            scheme.layout_with_strides(&strides)
        }
        Mutation::Exponent {
            index,
            endpoint,
            slice,
        } => {
            let mut layout = scheme.layout()?;
            let e = layout
                .indices
                .get_mut(*index)
                .and_then(|c| c.exponents.get_mut(*endpoint))
                .and_then(|l| l.get_mut(*slice))
                .ok_or_else(|| Error::Shape("mutation outside the layout".into()))?;
            *e += 1;
            Ok(layout)
        }
    }
}

/// 2-node plans of up to `max_indices` indices with `prod L <= max_partitions`.
pub fn two_node_sweep(max_indices: usize, max_partitions: usize) -> Vec<SlicingPlan> {
    let mut out = Vec::new();
    let mut prefix: Vec<usize> = Vec::new();
    fn rec(prefix: &mut Vec<usize>, budget: usize, left: usize, out: &mut Vec<SlicingPlan>) {
        if !prefix.is_empty() {
            let params: Vec<(usize, usize)> = prefix.iter().map(|l| (2, *l)).collect();
            out.push(SlicingPlan::from_params(&params).expect("valid params"));
        }
        if left == 0 {
            return;
        }
        for l in 1..=budget {
            prefix.push(l);
            rec(prefix, budget / l, left - 1, out);
            prefix.pop();
        }
    }
    rec(&mut prefix, max_partitions, max_indices, &mut out);
    out
}

/// Hyperedge plans with `m` in `nodes`, `L` in `dims`, up to `max_indices`
/// indices and output degree at most `max_degree`.
pub fn hyper_sweep(
    nodes: std::ops::RangeInclusive<usize>,
    dims: std::ops::RangeInclusive<usize>,
    max_indices: usize,
    max_degree: u64,
) -> Vec<SlicingPlan> {
    let choices: Vec<(usize, usize, u64)> = nodes
        .flat_map(|m| dims.clone().map(move |l| (m, l)))
        .filter_map(|(m, l)| hyper_span(m, l).ok().map(|d| (m, l, d)))
        .filter(|(_, _, d)| *d <= max_degree + 1)
        .collect();
    let mut out = Vec::new();
    fn rec(
        choices: &[(usize, usize, u64)],
        prefix: &mut Vec<(usize, usize)>,
        span: u64,
        left: usize,
        limit: u64,
        out: &mut Vec<SlicingPlan>,
    ) {
        if !prefix.is_empty() {
            out.push(SlicingPlan::from_params(prefix).expect("valid params"));
        }
        if left == 0 {
            return;
        }
        for &(m, l, d) in choices {
            let next = span * d;
            if next <= limit {
                prefix.push((m, l));
                rec(choices, prefix, next, left - 1, limit, out);
                prefix.pop();
            }
        }
    }
    rec(&choices, &mut Vec::new(), 1, max_indices, max_degree + 1, &mut out);
    out
}

/// One row of an alignment sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheme: SchemeKind,
    pub plan: String,
    pub degree: u64,
    pub result: Alignment,
}

/// Checks every plan under `kind`, in parallel; rows keep the input order.
pub fn alignment_sweep(kind: SchemeKind, plans: &[SlicingPlan]) -> Result<Vec<SweepRow>> {
    plans
        .par_iter()
        .map(|p| {
            let scheme = CodeScheme::new(kind, p)?;
            Ok(SweepRow {
                scheme: kind,
                plan: p.to_string(),
                degree: scheme.degree(),
                result: check_alignment(&scheme)?,
            })
        })
        .collect()
}
