//! Polynomial codes over sliced indices: 2-node and hyperedge templates,
//! partial coding, worker-count formulas and the decode geometry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::network::{Assignments, SliceAssignment, SlicedIndex, SlicingPlan, TensorNetwork};
use crate::tensor::{IndexLabel, Tensor};

/// Plans whose output polynomial degree exceeds this are rejected.
pub const MAX_DEGREE: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "2node")]
    TwoNode,
    #[serde(rename = "hyper")]
    Hyperedge,
    #[serde(rename = "partial2node")]
    PartialTwoNode,
    #[serde(rename = "partial1")]
    PartialOneIndex,
    #[serde(rename = "replicate")]
    NaiveReplication,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::TwoNode,
        SchemeKind::Hyperedge,
        SchemeKind::PartialTwoNode,
        SchemeKind::PartialOneIndex,
        SchemeKind::NaiveReplication,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::TwoNode => "2node",
            SchemeKind::Hyperedge => "hyper",
            SchemeKind::PartialTwoNode => "partial2node",
            SchemeKind::PartialOneIndex => "partial1",
            SchemeKind::NaiveReplication => "replicate",
        }
    }

    pub fn is_coded(&self) -> bool {
        *self != SchemeKind::NaiveReplication
    }

    fn template(&self) -> Template {
        match self {
            SchemeKind::TwoNode | SchemeKind::PartialTwoNode => Template::Aligned,
            SchemeKind::Hyperedge | SchemeKind::PartialOneIndex => Template::Separated,
            SchemeKind::NaiveReplication => Template::Aligned,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::SchemeNotApplicable(format!(
                    "unknown scheme `{s}` (expected replicate, 2node, hyper, partial2node or partial1)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Template {
    /// Forward and reversed monomials; all desired products share one exponent.
    Aligned,
    /// Geometric gaps; every desired product gets its own exponent.
    Separated,
}

/// Which coefficients of a group's output polynomial carry the result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeGeometry {
    /// The answer is the coefficient at this exponent.
    Aligned { exponent: u64 },
    /// The answer is the sum of these coefficients, one per coded assignment.
    Separated { positions: Vec<(SliceAssignment, u64)> },
}

impl DecodeGeometry {
    pub fn exponents(&self) -> Vec<u64> {
        match self {
            DecodeGeometry::Aligned { exponent } => vec![*exponent],
            DecodeGeometry::Separated { positions } => positions.iter().map(|(_, e)| *e).collect(),
        }
    }
}

/// Exponent lists attached to each endpoint of one coded index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCode {
    pub label: IndexLabel,
    pub dim: usize,
    /// `exponents[r][j]` multiplies slice `j + 1` on the `r`-th endpoint
    /// (endpoints ordered by tensor id).
    pub exponents: Vec<Vec<u64>>,
}

impl IndexCode {
    pub fn nodes(&self) -> usize {
        self.exponents.len()
    }
}

/// Everything the encoder and the symbolic checker need about a group code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeLayout {
    pub indices: Vec<IndexCode>,
    pub degree: u64,
    pub target: DecodeGeometry,
}

/// `(forward, reversed)` exponents of the 2-node template.
pub fn template_exponents_2node(dim: usize, stride: u64) -> Result<(Vec<u64>, Vec<u64>)> {
    let forward = (0..dim as u64)
        .map(|j| j.checked_mul(stride).ok_or(Error::Overflow("2-node exponent")))
        .collect::<Result<Vec<u64>>>()?;
    let reversed = forward.iter().rev().copied().collect();
    Ok((forward, reversed))
}

/// `(m^j - 1) / (m - 1)` for `j = 0, 1, ...`: `0, 1, 1 + m, 1 + m + m^2, ...`.
fn repunit(m: u64, j: u32) -> Result<u64> {
    let mut acc = 0u64;
    for _ in 0..j {
        acc = acc
            .checked_mul(m)
            .and_then(|v| v.checked_add(1))
            .ok_or(Error::Overflow("hyperedge exponent"))?;
    }
    Ok(acc)
}

/// Exponents of the hyperedge template for an `m`-node index of dimension `dim`.
pub fn template_exponents_hyper(m: usize, dim: usize, stride: u64) -> Result<Vec<u64>> {
    (0..dim as u32)
        .map(|j| {
            repunit(m as u64, j)?
                .checked_mul(stride)
                .ok_or(Error::Overflow("hyperedge exponent"))
        })
        .collect()
}

/// Per-index spread of the hyperedge code, `(m^L - 1) / (m - 1)`.
pub fn hyper_span(m: usize, dim: usize) -> Result<u64> {
    repunit(m as u64, dim as u32)
}

fn checked_product(values: impl IntoIterator<Item = u64>, what: &'static str) -> Result<u64> {
    values
        .into_iter()
        .try_fold(1u64, |acc, v| acc.checked_mul(v))
        .ok_or(Error::Overflow(what))
}

/// Strides of the 2-node code (`prod_{k<i} L_k`) or the hyperedge code
/// (`prod_{j<i} (m_j^{L_j} - 1) / (m_j - 1)`) for the given indices.
pub fn strides(indices: &[SlicedIndex], aligned: bool) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(indices.len());
    let mut acc = 1u64;
    for idx in indices {
        out.push(acc);
        let step = if aligned {
            idx.dim as u64
        } else {
            hyper_span(idx.nodes, idx.dim)?
        };
        acc = acc.checked_mul(step).ok_or(Error::Overflow("stride"))?;
    }
    Ok(out)
}

/// A code choice bound to a slicing plan. The stored plan lists coded
/// indices first; the remaining indices are enumerated as independent groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeScheme {
    kind: SchemeKind,
    plan: SlicingPlan,
    coded: usize,
    degree: u64,
}

impl CodeScheme {
    pub fn new(kind: SchemeKind, plan: &SlicingPlan) -> Result<Self> {
        let indices = plan.indices().to_vec();
        let (ordered, coded) = match kind {
            SchemeKind::NaiveReplication => (indices, 0),
            SchemeKind::TwoNode => {
                if let Some(bad) = indices.iter().find(|i| i.nodes != 2) {
                    return Err(Error::SchemeNotApplicable(format!(
                        "2node needs every sliced index to join two tensors; `{}` joins {}",
                        bad.label, bad.nodes
                    )));
                }
                let n = indices.len();
                (indices, n)
            }
            SchemeKind::Hyperedge => {
                let n = indices.len();
                (indices, n)
            }
            SchemeKind::PartialTwoNode => {
                let (two, rest): (Vec<SlicedIndex>, Vec<SlicedIndex>) =
                    indices.into_iter().partition(|i| i.nodes == 2);
                if two.is_empty() {
                    return Err(Error::SchemeNotApplicable(
                        "partial2node needs at least one 2-node sliced index".into(),
                    ));
                }
                let k = two.len();
                let mut ordered = two;
                ordered.extend(rest);
                (ordered, k)
            }
            SchemeKind::PartialOneIndex => {
                if indices.is_empty() {
                    return Err(Error::SchemeNotApplicable(
                        "partial1 needs at least one sliced index".into(),
                    ));
                }
                let pos = indices
                    .iter()
                    .enumerate()
                    .min_by_key(|(p, i)| (i.nodes, *p))
                    .map(|(p, _)| p)
                    .expect("non-empty");
                let mut ordered = indices;
                let first = ordered.remove(pos);
                ordered.insert(0, first);
                (ordered, 1)
            }
        };
        let mut scheme = CodeScheme {
            kind,
            plan: SlicingPlan::from_indices(ordered),
            coded,
            degree: 0,
        };
        scheme.degree = scheme.compute_degree()?;
        if scheme.degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(scheme.degree));
        }
        Ok(scheme)
    }

    fn compute_degree(&self) -> Result<u64> {
        let coded = self.coded_indices();
        match self.kind.template() {
            _ if coded.is_empty() => Ok(0),
            Template::Aligned => {
                let n = checked_product(coded.iter().map(|i| i.dim as u64), "degree")?;
                (n - 1).checked_mul(2).ok_or(Error::Overflow("degree"))
            }
            Template::Separated => {
                let spans = coded
                    .iter()
                    .map(|i| hyper_span(i.nodes, i.dim))
                    .collect::<Result<Vec<u64>>>()?;
                Ok(checked_product(spans, "degree")? - 1)
            }
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// The plan with coded indices first.
    pub fn plan(&self) -> &SlicingPlan {
        &self.plan
    }

    pub fn coded_indices(&self) -> &[SlicedIndex] {
        &self.plan.indices()[..self.coded]
    }

    pub fn uncoded_indices(&self) -> &[SlicedIndex] {
        &self.plan.indices()[self.coded..]
    }

    /// Degree of each group's output polynomial.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Number of sliced partitions `N`.
    pub fn partitions(&self) -> Result<u64> {
        self.plan.partitions()
    }

    /// Number of independent groups (assignments of the uncoded indices).
    pub fn groups(&self) -> Result<u64> {
        checked_product(self.uncoded_indices().iter().map(|i| i.dim as u64), "group count")
    }

    pub fn group_assignments(&self) -> Assignments {
        Assignments::new(self.uncoded_indices().iter().map(|i| i.dim).collect())
    }

    /// Workers each group needs to survive `f` failures: `d + f + 1`.
    pub fn workers_per_group(&self, f: u64) -> u128 {
        self.degree as u128 + f as u128 + 1
    }

    /// Total workers needed to tolerate any `f` failures.
    pub fn f_resilient(&self, f: u64) -> Result<u128> {
        (self.groups()? as u128)
            .checked_mul(self.workers_per_group(f))
            .ok_or(Error::Overflow("worker count"))
    }

    /// Workers saved relative to `(f + 1)`-fold replication of every slice.
    pub fn gain(&self, f: u64) -> Result<i128> {
        let naive = (self.partitions()? as u128)
            .checked_mul(f as u128 + 1)
            .ok_or(Error::Overflow("worker count"))?;
        Ok(naive as i128 - self.f_resilient(f)? as i128)
    }

    /// Strides of the coded indices.
    pub fn strides(&self) -> Result<Vec<u64>> {
        strides(self.coded_indices(), self.kind.template() == Template::Aligned)
    }

    /// Where the result sits in each group's output polynomial.
    pub fn desired_positions(&self) -> Result<DecodeGeometry> {
        self.geometry_for(&self.strides()?)
    }

    fn geometry_for(&self, strides: &[u64]) -> Result<DecodeGeometry> {
        let coded = self.coded_indices();
        match self.kind.template() {
            Template::Aligned => {
                let n = checked_product(coded.iter().map(|i| i.dim as u64), "target")?;
                Ok(DecodeGeometry::Aligned { exponent: n - 1 })
            }
            Template::Separated => {
                let dims = coded.iter().map(|i| i.dim).collect();
                let positions = Assignments::new(dims)
                    .map(|a| {
                        let mut e = 0u64;
                        for ((idx, s), stride) in coded.iter().zip(&a.0).zip(strides) {
                            let m = idx.nodes as u64;
                            let term = repunit(m, *s as u32 - 1)?
                                .checked_mul(m)
                                .and_then(|v| v.checked_mul(*stride))
                                .ok_or(Error::Overflow("desired exponent"))?;
                            e = e.checked_add(term).ok_or(Error::Overflow("desired exponent"))?;
                        }
                        Ok((a, e))
                    })
                    .collect::<Result<_>>()?;
                Ok(DecodeGeometry::Separated { positions })
            }
        }
    }

    /// Exponent lists and target for the coded indices.
    pub fn layout(&self) -> Result<CodeLayout> {
        self.layout_with_strides(&self.strides()?)
    }

    /// Layout built from caller-supplied strides, with the degree and
    /// target still taken from the closed forms.
    pub fn layout_with_strides(&self, strides: &[u64]) -> Result<CodeLayout> {
        let coded = self.coded_indices();
        if strides.len() != coded.len() {
            return Err(Error::Shape(format!(
                "{} strides for {} coded indices",
                strides.len(),
                coded.len()
            )));
        }
        let mut indices = Vec::with_capacity(coded.len());
        for (idx, &stride) in coded.iter().zip(strides) {
            let exponents = match self.kind.template() {
                Template::Aligned => {
                    let (fwd, rev) = template_exponents_2node(idx.dim, stride)?;
                    vec![fwd, rev]
                }
                Template::Separated => {
                    let list = template_exponents_hyper(idx.nodes, idx.dim, stride)?;
                    vec![list; idx.nodes]
                }
            };
            indices.push(IndexCode {
                label: idx.label.clone(),
                dim: idx.dim,
                exponents,
            });
        }
        Ok(CodeLayout {
            indices,
            degree: self.degree,
            target: self.desired_positions()?,
        })
    }

    /// Full assignment of the original plan order for a group and a coded assignment.
    pub fn full_assignment(&self, group: &SliceAssignment, coded: &SliceAssignment) -> SliceAssignment {
        SliceAssignment(coded.0.iter().chain(&group.0).copied().collect())
    }
}

impl fmt::Display for CodeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on [{}]", self.kind, self.plan)
    }
}

/// Every scheme worth considering for `plan`, in preference order.
pub fn candidate_schemes(plan: &SlicingPlan) -> Vec<CodeScheme> {
    let n = plan.len();
    let two_node = plan.indices().iter().filter(|i| i.nodes == 2).count();
    let mut kinds = Vec::new();
    if two_node == n {
        kinds.push(SchemeKind::TwoNode);
    }
    kinds.push(SchemeKind::Hyperedge);
    if two_node >= 1 && two_node < n {
        kinds.push(SchemeKind::PartialTwoNode);
    }
    if n >= 2 {
        kinds.push(SchemeKind::PartialOneIndex);
    }
    kinds.push(SchemeKind::NaiveReplication);
    kinds
        .into_iter()
        .filter_map(|k| CodeScheme::new(k, plan).ok())
        .collect()
}

/// Scheme with the fewest workers for `f` failures. A coded scheme is only
/// chosen when it strictly beats replication; coded ties keep the order of
/// [`candidate_schemes`].
pub fn plan_best(plan: &SlicingPlan, f: u64) -> Result<CodeScheme> {
    let mut best_coded: Option<(u128, CodeScheme)> = None;
    let mut naive: Option<(u128, CodeScheme)> = None;
    for s in candidate_schemes(plan) {
        let Ok(w) = s.f_resilient(f) else { continue };
        if s.kind() == SchemeKind::NaiveReplication {
            naive = Some((w, s));
        } else if best_coded.as_ref().is_none_or(|(b, _)| w < *b) {
            best_coded = Some((w, s));
        }
    }
    match (best_coded, naive) {
        (Some((c, s)), Some((r, _))) if c < r => Ok(s),
        (_, Some((_, s))) => Ok(s),
        (Some((_, s)), None) => Ok(s),
        (None, None) => Err(Error::Overflow("worker count")),
    }
}

/// One worker's network: coded indices folded into polynomials at `point`,
/// uncoded indices fixed to `group`.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedNetwork<F: Field> {
    pub network: TensorNetwork<F>,
    pub point: F::Elem,
    pub group: SliceAssignment,
}

/// Checks that `scheme`'s plan describes sliceable edges of `net`.
pub fn check_applicable<F: Field>(net: &TensorNetwork<F>, scheme: &CodeScheme) -> Result<()> {
    let edges = net.edges();
    for idx in scheme.plan().indices() {
        match edges.get(&idx.label) {
            Some(e) if e.nodes() == idx.nodes && e.dim == idx.dim => {}
            Some(e) => {
                return Err(Error::SchemeNotApplicable(format!(
                    "`{}` has m={}, L={} in the network but m={}, L={} in the plan",
                    idx.label,
                    e.nodes(),
                    e.dim,
                    idx.nodes,
                    idx.dim
                )))
            }
            None => return Err(Error::UnknownAxis(idx.label.to_string())),
        }
    }
    net.validate(&scheme.plan().labels()).into_result()
}

/// Encodes `net` at `x` for one group of `scheme`.
pub fn encode<F: Field>(
    net: &TensorNetwork<F>,
    scheme: &CodeScheme,
    x: F::Elem,
    group: &SliceAssignment,
) -> Result<EncodedNetwork<F>> {
    check_applicable(net, scheme)?;
    let layout = scheme.layout()?;
    encode_with_layout(net, scheme, &layout, x, group)
}

/// Like [`encode`] but with an explicit layout; skips the plan checks.
pub fn encode_with_layout<F: Field>(
    net: &TensorNetwork<F>,
    scheme: &CodeScheme,
    layout: &CodeLayout,
    x: F::Elem,
    group: &SliceAssignment,
) -> Result<EncodedNetwork<F>> {
    let uncoded = scheme.uncoded_indices();
    if group.0.len() != uncoded.len() {
        return Err(Error::Shape(format!(
            "group assignment has {} values, scheme has {} uncoded indices",
            group.0.len(),
            uncoded.len()
        )));
    }
    let fixes: Vec<(IndexLabel, usize)> = uncoded
        .iter()
        .zip(&group.0)
        .map(|(i, v)| (i.label.clone(), *v))
        .collect();
    let field = net.field();
    let edges = net.edges();
    let mut out = net.fix_indices(&fixes)?;
    for code in &layout.indices {
        let edge = edges
            .get(&code.label)
            .ok_or_else(|| Error::UnknownAxis(code.label.to_string()))?;
        if edge.nodes() != code.nodes() {
            return Err(Error::SchemeNotApplicable(format!(
                "`{}` has {} endpoints, layout expects {}",
                code.label,
                edge.nodes(),
                code.nodes()
            )));
        }
        for ((id, _), exps) in edge.endpoints.iter().zip(&code.exponents) {
            let t = out.tensor(id).expect("endpoint exists");
            let slices = (1..=code.dim)
                .map(|j| t.fix_index(&code.label, j))
                .collect::<Result<Vec<Tensor<F>>>>()?;
            let terms: Vec<(F::Elem, &Tensor<F>)> = exps
                .iter()
                .zip(&slices)
                .map(|(e, s)| (field.pow(x, *e), s))
                .collect();
            let encoded = Tensor::linear_combination(&terms)?;
            out = out.replace_tensor(id, encoded)?;
        }
        out = out.drop_label(&code.label);
    }
    Ok(EncodedNetwork {
        network: out,
        point: x,
        group: group.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(params: &[(usize, usize)]) -> SlicingPlan {
        SlicingPlan::from_params(params).unwrap()
    }

    #[test]
    fn template_examples() {
        assert_eq!(
            template_exponents_2node(4, 1).unwrap(),
            (vec![0, 1, 2, 3], vec![3, 2, 1, 0])
        );
        assert_eq!(
            template_exponents_2node(3, 4).unwrap(),
            (vec![0, 4, 8], vec![8, 4, 0])
        );
        assert_eq!(template_exponents_2node(1, 9).unwrap(), (vec![0], vec![0]));
        assert_eq!(template_exponents_hyper(3, 2, 1).unwrap(), vec![0, 1]);
        assert_eq!(template_exponents_hyper(4, 2, 4).unwrap(), vec![0, 4]);
        assert_eq!(template_exponents_hyper(2, 3, 1).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn stride_examples() {
        let p = plan(&[(2, 4), (2, 3)]);
        assert_eq!(strides(p.indices(), true).unwrap(), vec![1, 4]);
        let p = plan(&[(3, 2), (4, 2)]);
        assert_eq!(strides(p.indices(), false).unwrap(), vec![1, 4]);
        let p = plan(&[(5, 3)]);
        assert_eq!(strides(p.indices(), false).unwrap(), vec![1]);
    }

    #[test]
    fn first_example_formulas() {
        let s = CodeScheme::new(SchemeKind::TwoNode, &plan(&[(2, 4), (2, 3)])).unwrap();
        assert_eq!(s.degree(), 22);
        for f in 0..=5u64 {
            assert_eq!(s.f_resilient(f).unwrap(), f as u128 + 23);
            assert_eq!(s.gain(f).unwrap(), 11 * (f as i128 - 1));
        }
        assert_eq!(s.desired_positions().unwrap(), DecodeGeometry::Aligned { exponent: 11 });
    }

    #[test]
    fn second_example_formulas() {
        let s = CodeScheme::new(SchemeKind::Hyperedge, &plan(&[(3, 2), (4, 2)])).unwrap();
        assert_eq!(s.degree(), 19);
        for f in 0..=8u64 {
            assert_eq!(s.f_resilient(f).unwrap(), f as u128 + 20);
            assert_eq!(s.gain(f).unwrap(), 3 * f as i128 - 16);
        }
        let DecodeGeometry::Separated { positions } = s.desired_positions().unwrap() else {
            panic!("hyperedge geometry must be separated");
        };
        let got: Vec<(Vec<usize>, u64)> = positions.into_iter().map(|(a, e)| (a.0, e)).collect();
        assert_eq!(
            got,
            vec![(vec![1, 1], 0), (vec![1, 2], 16), (vec![2, 1], 3), (vec![2, 2], 19)]
        );
        let single = CodeScheme::new(SchemeKind::Hyperedge, &plan(&[(3, 2)])).unwrap();
        assert_eq!(single.desired_positions().unwrap().exponents(), vec![0, 3]);
    }

    #[test]
    fn partial_and_naive_formulas() {
        let p = plan(&[(3, 2), (2, 2)]);
        let partial = CodeScheme::new(SchemeKind::PartialTwoNode, &p).unwrap();
        assert_eq!(partial.coded_indices()[0].nodes, 2);
        assert_eq!(partial.degree(), 2);
        assert_eq!(partial.groups().unwrap(), 2);
        assert_eq!(partial.f_resilient(2).unwrap(), 10);
        let hyper = CodeScheme::new(SchemeKind::Hyperedge, &p).unwrap();
        assert_eq!(hyper.f_resilient(2).unwrap(), 14);

        let p = plan(&[(4, 3), (3, 2), (5, 2)]);
        let one = CodeScheme::new(SchemeKind::PartialOneIndex, &p).unwrap();
        assert_eq!(one.coded_indices()[0].nodes, 3);
        // (L_others = 3 * 2) * (f + 1 + 3)
        assert_eq!(one.f_resilient(1).unwrap(), 6 * 5);

        let naive = CodeScheme::new(SchemeKind::NaiveReplication, &p).unwrap();
        for f in 0..=10 {
            assert_eq!(naive.gain(f).unwrap(), 0);
            assert_eq!(naive.f_resilient(f).unwrap(), 12 * (f as u128 + 1));
        }
    }

    #[test]
    fn structural_preconditions() {
        assert!(CodeScheme::new(SchemeKind::TwoNode, &plan(&[(2, 2), (3, 2)])).is_err());
        assert!(CodeScheme::new(SchemeKind::PartialTwoNode, &plan(&[(3, 2)])).is_err());
        assert!(CodeScheme::new(SchemeKind::PartialOneIndex, &plan(&[])).is_err());
        assert!(matches!(
            CodeScheme::new(SchemeKind::Hyperedge, &plan(&[(10, 13), (10, 2)])),
            Err(Error::DegreeTooLarge(_))
        ));
        assert!(matches!(
            CodeScheme::new(SchemeKind::Hyperedge, &plan(&[(40, 30)])),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn plan_best_examples() {
        let s = plan_best(&plan(&[(2, 3), (2, 2)]), 2).unwrap();
        assert_eq!(s.kind(), SchemeKind::TwoNode);
        let s = plan_best(&plan(&[(2, 2), (3, 2)]), 2).unwrap();
        assert_eq!(s.kind(), SchemeKind::PartialTwoNode);
        assert_eq!(s.f_resilient(2).unwrap(), 10);
        let s = plan_best(&plan(&[(3, 2), (4, 2)]), 2).unwrap();
        assert_eq!(s.kind(), SchemeKind::NaiveReplication);
        assert_eq!(s.f_resilient(2).unwrap(), 12);
        let s = plan_best(&plan(&[(2, 4), (2, 3)]), 1).unwrap();
        assert_eq!(s.kind(), SchemeKind::NaiveReplication);
    }

    #[test]
    fn scheme_names_round_trip() {
        for k in SchemeKind::ALL {
            assert_eq!(k.name().parse::<SchemeKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("auto".parse::<SchemeKind>().is_err());
    }
}
