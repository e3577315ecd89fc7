//! Tensor networks: tensors joined by (hyper)edges, slicing along a set of
//! non-adjacent closed indices, and full contraction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::tensor::{product_sum, IndexLabel, Tensor};

pub type TensorId = String;

/// An index as seen from the network: its dimension and the tensors holding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub label: IndexLabel,
    pub dim: usize,
    /// `(tensor id, axis position)`, sorted by tensor id.
    pub endpoints: Vec<(TensorId, usize)>,
}

impl Edge {
    pub fn nodes(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_open(&self) -> bool {
        self.endpoints.len() == 1
    }

    pub fn is_hyperedge(&self) -> bool {
        self.endpoints.len() >= 3
    }
}

/// A structural problem found by [`TensorNetwork::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    EmptyLabel { tensor: TensorId },
    DanglingAxis { tensor: TensorId, label: String },
    DimensionMismatch { tensor: TensorId, label: String, declared: usize, found: usize },
    UnusedLabel { label: String },
    FieldMismatch { tensor: TensorId },
    UnknownSliceLabel { label: String },
    DuplicateSliceLabel { label: String },
    OpenEdgeInPlan { label: String },
    AdjacentSlicedIndices { first: String, second: String, tensor: TensorId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyLabel { tensor } => write!(f, "empty axis label on tensor `{tensor}`"),
            Violation::DanglingAxis { tensor, label } => {
                write!(f, "dangling axis `{label}` on tensor `{tensor}` (label not declared)")
            }
            Violation::DimensionMismatch { tensor, label, declared, found } => write!(
                f,
                "dimension mismatch: `{label}` declared {declared}, tensor `{tensor}` has {found}"
            ),
            Violation::UnusedLabel { label } => write!(f, "label `{label}` is not used by any tensor"),
            Violation::FieldMismatch { tensor } => {
                write!(f, "tensor `{tensor}` lives in a different field")
            }
            Violation::UnknownSliceLabel { label } => write!(f, "unknown label `{label}` in slicing plan"),
            Violation::DuplicateSliceLabel { label } => {
                write!(f, "label `{label}` listed twice in slicing plan")
            }
            Violation::OpenEdgeInPlan { label } => write!(f, "open edge not sliceable: `{label}`"),
            Violation::AdjacentSlicedIndices { first, second, tensor } => write!(
                f,
                "adjacent sliced indices: `{first}` and `{second}` both touch tensor `{tensor}`"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Warning {
    Disconnected { components: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Disconnected { components } => {
                write!(f, "network has {components} disconnected components")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// One sliced index: its label, node count `m` and dimension `L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlicedIndex {
    pub label: IndexLabel,
    pub nodes: usize,
    pub dim: usize,
}

/// Ordered list of sliced indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlicingPlan {
    indices: Vec<SlicedIndex>,
}

impl SlicingPlan {
    /// Plan for `labels` on `net`; fails unless `net.validate(labels)` is clean.
    pub fn new<F: Field>(net: &TensorNetwork<F>, labels: &[IndexLabel]) -> Result<Self> {
        net.validate(labels).into_result()?;
        let edges = net.edges();
        let indices = labels
            .iter()
            .map(|l| {
                let e = &edges[l];
                SlicedIndex {
                    label: l.clone(),
                    nodes: e.nodes(),
                    dim: e.dim,
                }
            })
            .collect();
        Ok(SlicingPlan { indices })
    }

    /// A network-free plan from `(m, L)` pairs, labelled `s1, s2, ...`.
    pub fn from_params(params: &[(usize, usize)]) -> Result<Self> {
        let indices = params
            .iter()
            .enumerate()
            .map(|(i, &(m, l))| {
                if m < 2 || l < 1 {
                    return Err(Error::SchemeNotApplicable(format!(
                        "sliced index needs m >= 2 and L >= 1, got m={m}, L={l}"
                    )));
                }
                Ok(SlicedIndex {
                    label: IndexLabel::new(format!("s{}", i + 1)),
                    nodes: m,
                    dim: l,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SlicingPlan { indices })
    }

    pub(crate) fn from_indices(indices: Vec<SlicedIndex>) -> Self {
        SlicingPlan { indices }
    }

    pub fn indices(&self) -> &[SlicedIndex] {
        &self.indices
    }

    pub fn labels(&self) -> Vec<IndexLabel> {
        self.indices.iter().map(|i| i.label.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `(m_i, L_i)` pairs in plan order.
    pub fn params(&self) -> Vec<(usize, usize)> {
        self.indices.iter().map(|i| (i.nodes, i.dim)).collect()
    }

    /// Number of sliced partitions, `N = prod L_i`.
    pub fn partitions(&self) -> Result<u64> {
        self.indices
            .iter()
            .try_fold(1u64, |acc, i| acc.checked_mul(i.dim as u64))
            .ok_or(Error::Overflow("partition count"))
    }

    /// All assignments in lexicographic order (last index fastest).
    pub fn assignments(&self) -> Assignments {
        Assignments::new(self.indices.iter().map(|i| i.dim).collect())
    }
}

impl fmt::Display for SlicingPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .indices
            .iter()
            .map(|i| format!("{}:{}", i.nodes, i.dim))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// 1-based values `s_1 .. s_n`, one per sliced index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SliceAssignment(pub Vec<usize>);

impl SliceAssignment {
    pub fn values(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for SliceAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Odometer over `1..=dims[i]` for every position.
#[derive(Clone, Debug)]
pub struct Assignments {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Assignments {
    pub fn new(dims: Vec<usize>) -> Self {
        let next = if dims.contains(&0) {
            None
        } else {
            Some(vec![1; dims.len()])
        };
        Assignments { dims, next }
    }
}

impl Iterator for Assignments {
    type Item = SliceAssignment;

    fn next(&mut self) -> Option<SliceAssignment> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if succ[k] < self.dims[k] {
                succ[k] += 1;
                self.next = Some(succ);
                break;
            }
            succ[k] = 1;
        }
        Some(SliceAssignment(current))
    }
}

/// Tensors keyed by id plus the declared dimension of every label.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorNetwork<F: Field> {
    field: F,
    dims: BTreeMap<IndexLabel, usize>,
    tensors: BTreeMap<TensorId, Tensor<F>>,
}

impl<F: Field> TensorNetwork<F> {
    /// Network with explicitly declared label dimensions. Structural problems
    /// are reported by [`validate`](Self::validate), not here.
    pub fn new(
        field: F,
        dims: BTreeMap<IndexLabel, usize>,
        tensors: impl IntoIterator<Item = (TensorId, Tensor<F>)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, t) in tensors {
            if map.insert(id.clone(), t).is_some() {
                return Err(Error::DuplicateLabel(format!("tensor id {id}")));
            }
        }
        Ok(TensorNetwork {
            field,
            dims,
            tensors: map,
        })
    }

    /// Network whose label dimensions are taken from the tensors themselves.
    pub fn from_tensors(field: F, tensors: impl IntoIterator<Item = (TensorId, Tensor<F>)>) -> Result<Self> {
        let tensors: Vec<(TensorId, Tensor<F>)> = tensors.into_iter().collect();
        let mut dims = BTreeMap::new();
        for (_, t) in &tensors {
            for a in t.axes() {
                dims.entry(a.label.clone()).or_insert(a.dim);
            }
        }
        Self::new(field, dims, tensors)
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn dims(&self) -> &BTreeMap<IndexLabel, usize> {
        &self.dims
    }

    pub fn tensors(&self) -> &BTreeMap<TensorId, Tensor<F>> {
        &self.tensors
    }

    pub fn tensor(&self, id: &str) -> Option<&Tensor<F>> {
        self.tensors.get(id)
    }

    /// Replaces tensor data while keeping its axes.
    pub fn with_tensor(mut self, id: &str, t: Tensor<F>) -> Result<Self> {
        match self.tensors.get(id) {
            Some(old) if old.axes() == t.axes() => {
                self.tensors.insert(id.to_string(), t);
                Ok(self)
            }
            Some(_) => Err(Error::Shape(format!("replacement for `{id}` changes its axes"))),
            None => Err(Error::UnknownAxis(format!("tensor {id}"))),
        }
    }

    pub(crate) fn replace_tensor(mut self, id: &str, t: Tensor<F>) -> Result<Self> {
        match self.tensors.get_mut(id) {
            Some(slot) => {
                *slot = t;
                Ok(self)
            }
            None => Err(Error::UnknownAxis(format!("tensor {id}"))),
        }
    }

    pub(crate) fn drop_label(mut self, label: &IndexLabel) -> Self {
        self.dims.remove(label);
        self
    }

    /// Every label carried by at least one tensor.
    pub fn edges(&self) -> BTreeMap<IndexLabel, Edge> {
        let mut edges: BTreeMap<IndexLabel, Edge> = BTreeMap::new();
        for (id, t) in &self.tensors {
            for (pos, a) in t.axes().iter().enumerate() {
                let dim = self.dims.get(&a.label).copied().unwrap_or(a.dim);
                edges
                    .entry(a.label.clone())
                    .or_insert_with(|| Edge {
                        label: a.label.clone(),
                        dim,
                        endpoints: Vec::new(),
                    })
                    .endpoints
                    .push((id.clone(), pos));
            }
        }
        edges
    }

    pub fn closed_labels(&self) -> Vec<IndexLabel> {
        self.edges()
            .into_values()
            .filter(|e| e.nodes() >= 2)
            .map(|e| e.label)
            .collect()
    }

    /// Open labels in lexicographic order.
    pub fn open_labels(&self) -> Vec<IndexLabel> {
        self.edges()
            .into_values()
            .filter(|e| e.is_open())
            .map(|e| e.label)
            .collect()
    }

    fn component_count(&self) -> usize {
        let ids: Vec<&TensorId> = self.tensors.keys().collect();
        let index_of: BTreeMap<&TensorId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let n = p[c];
                p[c] = r;
                c = n;
            }
            r
        }
        for e in self.edges().values() {
            let first = index_of[&e.endpoints[0].0];
            for (id, _) in &e.endpoints[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, index_of[id]));
                parent[a] = b;
            }
        }
        (0..ids.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Structural checks on the network and on a candidate slicing plan.
    pub fn validate(&self, slice_labels: &[IndexLabel]) -> ValidationReport {
        let mut report = ValidationReport::default();
        let field_kind = self.field.kind();
        let mut used = BTreeSet::new();
        for (id, t) in &self.tensors {
            if t.field().kind() != field_kind {
                report.violations.push(Violation::FieldMismatch { tensor: id.clone() });
            }
            for a in t.axes() {
                used.insert(a.label.clone());
                if a.label.as_str().is_empty() {
                    report.violations.push(Violation::EmptyLabel { tensor: id.clone() });
                }
                match self.dims.get(&a.label) {
                    None => report.violations.push(Violation::DanglingAxis {
                        tensor: id.clone(),
                        label: a.label.to_string(),
                    }),
                    Some(&d) if d != a.dim => report.violations.push(Violation::DimensionMismatch {
                        tensor: id.clone(),
                        label: a.label.to_string(),
                        declared: d,
                        found: a.dim,
                    }),
                    _ => {}
                }
            }
        }
        for l in self.dims.keys() {
            if !used.contains(l) {
                report.violations.push(Violation::UnusedLabel { label: l.to_string() });
            }
        }

        let edges = self.edges();
        let mut seen: BTreeSet<&IndexLabel> = BTreeSet::new();
        let mut owner: BTreeMap<&TensorId, &IndexLabel> = BTreeMap::new();
        for l in slice_labels {
            if !seen.insert(l) {
                report.violations.push(Violation::DuplicateSliceLabel { label: l.to_string() });
                continue;
            }
            let Some(e) = edges.get(l) else {
                report.violations.push(Violation::UnknownSliceLabel { label: l.to_string() });
                continue;
            };
            if e.is_open() {
                report.violations.push(Violation::OpenEdgeInPlan { label: l.to_string() });
                continue;
            }
            for (id, _) in &e.endpoints {
                if let Some(prev) = owner.insert(id, l) {
                    report.violations.push(Violation::AdjacentSlicedIndices {
                        first: prev.to_string(),
                        second: l.to_string(),
                        tensor: id.clone(),
                    });
                }
            }
        }

        let components = self.component_count();
        if components > 1 {
            report.warnings.push(Warning::Disconnected { components });
        }
        report
    }

    fn check_plan(&self, plan: &SlicingPlan) -> Result<()> {
        let edges = self.edges();
        for idx in plan.indices() {
            match edges.get(&idx.label) {
                Some(e) if e.nodes() == idx.nodes && e.dim == idx.dim => {}
                Some(e) => {
                    return Err(Error::SchemeNotApplicable(format!(
                        "plan expects `{}` with m={}, L={}; network has m={}, L={}",
                        idx.label,
                        idx.nodes,
                        idx.dim,
                        e.nodes(),
                        e.dim
                    )))
                }
                None => return Err(Error::UnknownAxis(idx.label.to_string())),
            }
        }
        self.validate(&plan.labels()).into_result()
    }

    /// Fixes each `(label, value)` on every tensor carrying the label and
    /// drops the label from the network.
    pub fn fix_indices(&self, fixes: &[(IndexLabel, usize)]) -> Result<Self> {
        let mut out = self.clone();
        for (label, value) in fixes {
            for t in out.tensors.values_mut() {
                if t.has_axis(label) {
                    *t = t.fix_index(label, *value)?;
                }
            }
            out.dims.remove(label);
        }
        Ok(out)
    }

    /// The sliced partition for one assignment of the plan.
    pub fn slice(&self, plan: &SlicingPlan, assignment: &SliceAssignment) -> Result<Self> {
        if assignment.0.len() != plan.len() {
            return Err(Error::Shape(format!(
                "assignment has {} values, plan has {} indices",
                assignment.0.len(),
                plan.len()
            )));
        }
        self.check_plan(plan)?;
        let fixes: Vec<(IndexLabel, usize)> = plan
            .indices()
            .iter()
            .zip(&assignment.0)
            .map(|(i, v)| (i.label.clone(), *v))
            .collect();
        self.fix_indices(&fixes)
    }

    /// Canonical description of the labelled multigraph with dimensions,
    /// independent of tensor ids, axis order and data.
    pub fn topology_fingerprint(&self) -> String {
        let mut sigs: Vec<String> = self
            .tensors
            .values()
            .map(|t| {
                let mut axes: Vec<String> = t.axes().iter().map(|a| format!("{}:{}", a.label, a.dim)).collect();
                axes.sort();
                format!("[{}]", axes.join(","))
            })
            .collect();
        sigs.sort();
        format!("tn1|{}", sigs.join(";"))
    }

    /// Greedy contraction order. At each step the closed label whose
    /// contraction is cheapest (output volume times summed dimension) is
    /// taken next; ties go to the lexicographically smaller label.
    pub fn greedy_order(&self) -> Vec<IndexLabel> {
        let closed: BTreeSet<IndexLabel> = self.closed_labels().into_iter().collect();
        let mut shapes: Vec<BTreeMap<IndexLabel, usize>> = self
            .tensors
            .values()
            .map(|t| t.axes().iter().map(|a| (a.label.clone(), a.dim)).collect())
            .collect();
        let mut remaining = closed;
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let mut best: Option<(u128, &IndexLabel)> = None;
            for l in &remaining {
                let mut union: BTreeMap<&IndexLabel, usize> = BTreeMap::new();
                for s in shapes.iter().filter(|s| s.contains_key(l)) {
                    for (k, d) in s {
                        union.insert(k, *d);
                    }
                }
                let cost = union.values().fold(1u128, |acc, d| acc.saturating_mul(*d as u128));
                if best.is_none_or(|(c, _)| cost < c) {
                    best = Some((cost, l));
                }
            }
            let label = best.expect("non-empty").1.clone();
            let (holders, rest): (Vec<_>, Vec<_>) = shapes.into_iter().partition(|s| s.contains_key(&label));
            let mut fused: BTreeMap<IndexLabel, usize> = BTreeMap::new();
            for s in holders {
                fused.extend(s);
            }
            fused.remove(&label);
            shapes = rest;
            shapes.push(fused);
            remaining.remove(&label);
            order.push(label);
        }
        order
    }

    /// Contracts every closed edge and returns the tensor over the open
    /// labels, in lexicographic order. Uses the greedy order when `order` is
    /// `None`.
    pub fn full_contract(&self, order: Option<&[IndexLabel]>) -> Result<Tensor<F>> {
        self.validate(&[]).into_result()?;
        let closed: BTreeSet<IndexLabel> = self.closed_labels().into_iter().collect();
        let order: Vec<IndexLabel> = match order {
            Some(o) => {
                let given: BTreeSet<&IndexLabel> = o.iter().collect();
                if given.len() != o.len() {
                    return Err(Error::InvalidOrder("order repeats a label".into()));
                }
                if let Some(l) = o.iter().find(|l| !closed.contains(*l)) {
                    return Err(Error::InvalidOrder(format!("`{l}` is not a closed edge")));
                }
                if o.len() != closed.len() {
                    return Err(Error::InvalidOrder(format!(
                        "order lists {} of {} closed edges",
                        o.len(),
                        closed.len()
                    )));
                }
                o.to_vec()
            }
            None => self.greedy_order(),
        };

        let mut pool: Vec<Tensor<F>> = self.tensors.values().cloned().collect();
        for label in &order {
            let (holders, rest): (Vec<Tensor<F>>, Vec<Tensor<F>>) =
                pool.into_iter().partition(|t| t.has_axis(label));
            if holders.is_empty() {
                return Err(Error::InvalidOrder(format!("edge `{label}` vanished during contraction")));
            }
            let refs: Vec<&Tensor<F>> = holders.iter().collect();
            let fused = product_sum(&refs, Some(label))?;
            pool = rest;
            pool.push(fused);
        }

        let result = if pool.is_empty() {
            Tensor::scalar(self.field, self.field.one())
        } else if pool.len() == 1 {
            pool.pop().expect("one tensor")
        } else {
            let refs: Vec<&Tensor<F>> = pool.iter().collect();
            product_sum(&refs, None)?
        };
        let mut open: Vec<IndexLabel> = result.labels().cloned().collect();
        open.sort();
        result.permute(&open)
    }
}
