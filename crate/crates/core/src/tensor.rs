//! Dense row-major tensors with globally labeled axes, and the product-sum
//! kernel every contraction in the crate goes through.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::Field;

/// Name of an index (edge). Labels are unique network-wide.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexLabel(String);

impl IndexLabel {
    pub fn new(name: impl Into<String>) -> Self {
        IndexLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for IndexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for IndexLabel {
    fn from(s: &str) -> Self {
        IndexLabel(s.to_string())
    }
}

impl From<String> for IndexLabel {
    fn from(s: String) -> Self {
        IndexLabel(s)
    }
}

/// One axis of a tensor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axis {
    pub label: IndexLabel,
    pub dim: usize,
}

impl Axis {
    pub fn new(label: impl Into<IndexLabel>, dim: usize) -> Self {
        Axis {
            label: label.into(),
            dim,
        }
    }
}

/// Dense tensor. An empty axis list is a scalar holding one entry.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<F: Field> {
    field: F,
    axes: Vec<Axis>,
    data: Vec<F::Elem>,
}

impl<F: Field> Tensor<F> {
    pub fn new(field: F, axes: Vec<Axis>, data: Vec<F::Elem>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if a.dim == 0 {
                return Err(Error::Shape(format!("axis `{}` has dimension 0", a.label)));
            }
            if axes[..i].iter().any(|b| b.label == a.label) {
                return Err(Error::DuplicateLabel(a.label.to_string()));
            }
        }
        let expected = checked_volume(&axes)?;
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "data length {} does not match shape volume {}",
                data.len(),
                expected
            )));
        }
        Ok(Tensor { field, axes, data })
    }

    pub fn scalar(field: F, value: F::Elem) -> Self {
        Tensor {
            field,
            axes: Vec::new(),
            data: vec![value],
        }
    }

    pub fn filled(field: F, axes: Vec<Axis>, value: F::Elem) -> Result<Self> {
        let n = checked_volume(&axes)?;
        Self::new(field, axes, vec![value; n])
    }

    /// Builds a tensor from a function of the 0-based multi-index.
    pub fn from_fn(
        field: F,
        axes: Vec<Axis>,
        mut f: impl FnMut(&[usize]) -> F::Elem,
    ) -> Result<Self> {
        let dims: Vec<usize> = axes.iter().map(|a| a.dim).collect();
        let n = checked_volume(&axes)?;
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..n {
            data.push(f(&idx));
            advance(&mut idx, &dims);
        }
        Self::new(field, axes, data)
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn into_data(self) -> Vec<F::Elem> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &IndexLabel> {
        self.axes.iter().map(|a| &a.label)
    }

    pub fn position(&self, label: &IndexLabel) -> Option<usize> {
        self.axes.iter().position(|a| &a.label == label)
    }

    pub fn has_axis(&self, label: &IndexLabel) -> bool {
        self.position(label).is_some()
    }

    pub fn dim(&self, label: &IndexLabel) -> Option<usize> {
        self.position(label).map(|p| self.axes[p].dim)
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        row_major_strides(&self.axes)
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, index: &[usize]) -> Option<F::Elem> {
        if index.len() != self.axes.len() {
            return None;
        }
        let mut off = 0;
        for (i, (a, s)) in index.iter().zip(self.strides()).enumerate() {
            if *a >= self.axes[i].dim {
                return None;
            }
            off += a * s;
        }
        Some(self.data[off])
    }

    /// Value of a scalar tensor.
    pub fn scalar_value(&self) -> Option<F::Elem> {
        if self.axes.is_empty() {
            Some(self.data[0])
        } else {
            None
        }
    }

    /// Fixes `label` to the 1-based `value`, dropping that axis.
    pub fn fix_index(&self, label: &IndexLabel, value: usize) -> Result<Self> {
        if self.axes.is_empty() {
            return Err(Error::ScalarTensor);
        }
        let pos = self
            .position(label)
            .ok_or_else(|| Error::UnknownAxis(label.to_string()))?;
        let dim = self.axes[pos].dim;
        if value == 0 || value > dim {
            return Err(Error::SliceOutOfRange {
                label: label.to_string(),
                value,
                dim,
            });
        }
        let inner: usize = self.axes[pos + 1..].iter().map(|a| a.dim).product();
        let outer: usize = self.axes[..pos].iter().map(|a| a.dim).product();
        let mut data = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let start = (o * dim + value - 1) * inner;
            data.extend_from_slice(&self.data[start..start + inner]);
        }
        let mut axes = self.axes.clone();
        axes.remove(pos);
        Ok(Tensor {
            field: self.field,
            axes,
            data,
        })
    }

    /// Reorders axes to match `order`, which must be a permutation of the
    /// current labels.
    pub fn permute(&self, order: &[IndexLabel]) -> Result<Self> {
        if order.len() != self.axes.len() {
            return Err(Error::Shape(format!(
                "permutation has {} labels, tensor has {} axes",
                order.len(),
                self.axes.len()
            )));
        }
        let src_strides = self.strides();
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            let p = self
                .position(l)
                .ok_or_else(|| Error::UnknownAxis(l.to_string()))?;
            if perm.contains(&p) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            perm.push(p);
        }
        let axes: Vec<Axis> = perm.iter().map(|&p| self.axes[p].clone()).collect();
        let dims: Vec<usize> = axes.iter().map(|a| a.dim).collect();
        let gather: Vec<usize> = perm.iter().map(|&p| src_strides[p]).collect();
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(self.data.len());
        for _ in 0..self.data.len() {
            let off: usize = idx.iter().zip(&gather).map(|(i, s)| i * s).sum();
            data.push(self.data[off]);
            advance(&mut idx, &dims);
        }
        Ok(Tensor {
            field: self.field,
            axes,
            data,
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.axes != other.axes {
            return Err(Error::Shape(format!(
                "axis mismatch: {:?} vs {:?}",
                describe(&self.axes),
                describe(&other.axes)
            )));
        }
        Ok(())
    }

    /// Entrywise sum of two tensors with identical axes.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f.add(*a, *b))
            .collect();
        Ok(Tensor {
            field: f,
            axes: self.axes.clone(),
            data,
        })
    }

    pub fn scale(&self, c: F::Elem) -> Self {
        let f = self.field;
        Tensor {
            field: f,
            axes: self.axes.clone(),
            data: self.data.iter().map(|a| f.mul(*a, c)).collect(),
        }
    }

    /// `sum_t coeffs[t] * tensors[t]` over tensors with identical axes.
    pub fn linear_combination(terms: &[(F::Elem, &Tensor<F>)]) -> Result<Self> {
        let (first_c, first) = terms
            .first()
            .ok_or_else(|| Error::Shape("empty linear combination".into()))?;
        let f = first.field;
        let mut data: Vec<F::Elem> = first.data.iter().map(|a| f.mul(*a, *first_c)).collect();
        for (c, t) in &terms[1..] {
            first.check_same_shape(t)?;
            for (acc, v) in data.iter_mut().zip(&t.data) {
                *acc = f.add(*acc, f.mul(*v, *c));
            }
        }
        Ok(Tensor {
            field: f,
            axes: first.axes.clone(),
            data,
        })
    }

    /// Nested JSON arrays in axis order (a bare value for scalars).
    pub fn to_json(&self) -> Value {
        fn build<F: Field>(t: &Tensor<F>, depth: usize, offset: usize, strides: &[usize]) -> Value {
            if depth == t.axes.len() {
                return t.field.elem_to_json(t.data[offset]);
            }
            Value::Array(
                (0..t.axes[depth].dim)
                    .map(|i| build(t, depth + 1, offset + i * strides[depth], strides))
                    .collect(),
            )
        }
        build(self, 0, 0, &self.strides())
    }
}

fn describe(axes: &[Axis]) -> Vec<String> {
    axes.iter().map(|a| format!("{}:{}", a.label, a.dim)).collect()
}

fn checked_volume(axes: &[Axis]) -> Result<usize> {
    axes.iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.dim))
        .ok_or(Error::Overflow("tensor volume"))
}

pub(crate) fn row_major_strides(axes: &[Axis]) -> Vec<usize> {
    let mut strides = vec![1usize; axes.len()];
    for i in (0..axes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * axes[i + 1].dim;
    }
    strides
}

/// Row-major odometer step.
pub(crate) fn advance(idx: &mut [usize], dims: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Product-sum over an arbitrary list of tensors.
///
/// Labels appearing on several tensors are identified (the entries are
/// multiplied along them). The `summed` label, if any, is eliminated by
/// summation; every other label survives once, in first-appearance order.
pub fn product_sum<F: Field>(tensors: &[&Tensor<F>], summed: Option<&IndexLabel>) -> Result<Tensor<F>> {
    let field = tensors
        .first()
        .ok_or_else(|| Error::Shape("product-sum over an empty tensor list".into()))?
        .field;

    let mut out_axes: Vec<Axis> = Vec::new();
    let mut out_pos: HashMap<&IndexLabel, usize> = HashMap::new();
    let mut sum_dim: Option<usize> = None;
    for t in tensors {
        for a in &t.axes {
            if Some(&a.label) == summed {
                match sum_dim {
                    None => sum_dim = Some(a.dim),
                    Some(d) if d != a.dim => {
                        return Err(Error::DimensionMismatch {
                            label: a.label.to_string(),
                            expected: d,
                            found: a.dim,
                        })
                    }
                    _ => {}
                }
                continue;
            }
            match out_pos.get(&a.label) {
                Some(&p) if out_axes[p].dim != a.dim => {
                    return Err(Error::DimensionMismatch {
                        label: a.label.to_string(),
                        expected: out_axes[p].dim,
                        found: a.dim,
                    })
                }
                Some(_) => {}
                None => {
                    out_pos.insert(&a.label, out_axes.len());
                    out_axes.push(a.clone());
                }
            }
        }
    }
    let sum_dim = match (summed, sum_dim) {
        (Some(l), None) => return Err(Error::UnknownAxis(l.to_string())),
        (_, d) => d.unwrap_or(1),
    };

    // Per tensor: stride along each output axis (0 when absent) and along the
    // summed axis.
    let mut out_strides: Vec<Vec<usize>> = Vec::with_capacity(tensors.len());
    let mut sum_strides: Vec<usize> = Vec::with_capacity(tensors.len());
    for t in tensors {
        let ts = t.strides();
        let mut per_axis = vec![0usize; out_axes.len()];
        let mut s_stride = 0;
        for (a, s) in t.axes.iter().zip(&ts) {
            if Some(&a.label) == summed {
                s_stride = *s;
            } else {
                per_axis[out_pos[&a.label]] = *s;
            }
        }
        out_strides.push(per_axis);
        sum_strides.push(s_stride);
    }

    let dims: Vec<usize> = out_axes.iter().map(|a| a.dim).collect();
    let out_len = checked_volume(&out_axes)?;
    let mut data = Vec::with_capacity(out_len);
    let mut idx = vec![0usize; dims.len()];
    let mut offsets = vec![0usize; tensors.len()];
    let datas: Vec<&[F::Elem]> = tensors.iter().map(|t| t.data.as_slice()).collect();

    for _ in 0..out_len {
        let mut acc = field.zero();
        for v in 0..sum_dim {
            let mut p = datas[0][offsets[0] + v * sum_strides[0]];
            for t in 1..datas.len() {
                p = field.mul(p, datas[t][offsets[t] + v * sum_strides[t]]);
            }
            acc = field.add(acc, p);
        }
        data.push(acc);

        // Advance the odometer and the per-tensor offsets together.
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            for (off, st) in offsets.iter_mut().zip(&out_strides) {
                *off += st[k];
            }
            if idx[k] < dims[k] {
                break;
            }
            for (off, st) in offsets.iter_mut().zip(&out_strides) {
                *off -= st[k] * dims[k];
            }
            idx[k] = 0;
        }
    }

    Ok(Tensor {
        field,
        axes: out_axes,
        data,
    })
}

/// Contracts one index shared by every tensor in the list.
///
/// Every tensor must carry `shared` with the same dimension and all other
/// labels must be pairwise distinct across the list. The result's axes are
/// the tensors' remaining axes concatenated in list order.
pub fn multiway_contract<F: Field>(tensors: &[&Tensor<F>], shared: &IndexLabel) -> Result<Tensor<F>> {
    if tensors.is_empty() {
        return Err(Error::Shape("nothing to contract".into()));
    }
    let mut dim = None;
    let mut seen: HashMap<&IndexLabel, ()> = HashMap::new();
    for t in tensors {
        let d = t
            .dim(shared)
            .ok_or_else(|| Error::UnknownAxis(shared.to_string()))?;
        match dim {
            None => dim = Some(d),
            Some(e) if e != d => {
                return Err(Error::DimensionMismatch {
                    label: shared.to_string(),
                    expected: e,
                    found: d,
                })
            }
            _ => {}
        }
        for l in t.labels().filter(|l| *l != shared) {
            if seen.insert(l, ()).is_some() {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
    }
    product_sum(tensors, Some(shared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, RealField};
    use proptest::prelude::*;

    fn t(axes: &[(&str, usize)], data: &[f64]) -> Tensor<RealField> {
        Tensor::new(
            RealField,
            axes.iter().map(|(l, d)| Axis::new(*l, *d)).collect(),
            data.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn fix_index_matrix() {
        let b = t(&[("i", 2), ("j", 2)], &[1.0, 2.0, 3.0, 4.0]);
        let v = b.fix_index(&"j".into(), 1).unwrap();
        assert_eq!(v.axes(), &[Axis::new("i", 2)]);
        assert_eq!(v.data(), &[1.0, 3.0]);
    }

    #[test]
    fn fix_index_rank3() {
        let data: Vec<f64> = (1..=8).map(f64::from).collect();
        let c = t(&[("i", 2), ("j", 2), ("k", 2)], &data);
        let m = c.fix_index(&"i".into(), 2).unwrap();
        assert_eq!(m.axes(), &[Axis::new("j", 2), Axis::new("k", 2)]);
        assert_eq!(m.data(), &[5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn fix_index_errors() {
        let s = Tensor::scalar(RealField, 1.0);
        assert_eq!(s.fix_index(&"i".into(), 1), Err(Error::ScalarTensor));
        let b = t(&[("i", 2)], &[1.0, 2.0]);
        assert!(matches!(b.fix_index(&"q".into(), 1), Err(Error::UnknownAxis(_))));
        assert!(matches!(
            b.fix_index(&"i".into(), 0),
            Err(Error::SliceOutOfRange { .. })
        ));
        assert!(matches!(
            b.fix_index(&"i".into(), 3),
            Err(Error::SliceOutOfRange { .. })
        ));
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(Tensor::new(RealField, vec![Axis::new("i", 2)], vec![1.0]).is_err());
        assert!(matches!(
            Tensor::new(
                RealField,
                vec![Axis::new("i", 1), Axis::new("i", 1)],
                vec![1.0]
            ),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(Tensor::new(RealField, vec![Axis::new("i", 0)], vec![]).is_err());
    }

    #[test]
    fn identity_times_matrix() {
        let a = t(&[("i", 2), ("j", 2)], &[1.0, 0.0, 0.0, 1.0]);
        let b = t(&[("j", 2), ("k", 2)], &[5.0, 6.0, 7.0, 8.0]);
        let c = multiway_contract(&[&a, &b], &"j".into()).unwrap();
        assert_eq!(c.axes(), &[Axis::new("i", 2), Axis::new("k", 2)]);
        assert_eq!(c.data(), &[5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn three_vectors_on_a_hyperedge() {
        let a = t(&[("j", 2)], &[1.0, 2.0]);
        let b = t(&[("j", 2)], &[3.0, 4.0]);
        let c = t(&[("j", 2)], &[5.0, 6.0]);
        let s = multiway_contract(&[&a, &b, &c], &"j".into()).unwrap();
        assert_eq!(s.scalar_value(), Some(63.0));
    }

    #[test]
    fn textbook_two_by_two() {
        let a = t(&[("i", 2), ("j", 2)], &[1.0, 2.0, 3.0, 4.0]);
        let b = t(&[("j", 2), ("k", 2)], &[5.0, 6.0, 7.0, 8.0]);
        let c = multiway_contract(&[&a, &b], &"j".into()).unwrap();
        assert_eq!(c.data(), &[19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn multiway_contract_errors() {
        let a = t(&[("i", 2), ("j", 2)], &[1.0; 4]);
        let b = t(&[("j", 3)], &[1.0; 3]);
        assert!(matches!(
            multiway_contract(&[&a, &b], &"j".into()),
            Err(Error::DimensionMismatch { .. })
        ));
        let c = t(&[("i", 2), ("j", 2)], &[1.0; 4]);
        assert!(matches!(
            multiway_contract(&[&a, &c], &"j".into()),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn permute_transposes() {
        let a = t(&[("i", 2), ("j", 3)], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let p = a.permute(&["j".into(), "i".into()]).unwrap();
        assert_eq!(p.data(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(p.permute(&["i".into(), "j".into()]).unwrap(), a);
    }

    #[test]
    fn shared_non_summed_labels_are_identified() {
        // sum_j A_{jk} B_{jk} keeps k once (Hadamard along k).
        let a = t(&[("j", 2), ("k", 2)], &[1.0, 2.0, 3.0, 4.0]);
        let b = t(&[("j", 2), ("k", 2)], &[5.0, 6.0, 7.0, 8.0]);
        let c = product_sum(&[&a, &b], Some(&"j".into())).unwrap();
        assert_eq!(c.axes(), &[Axis::new("k", 2)]);
        assert_eq!(c.data(), &[1.0 * 5.0 + 3.0 * 7.0, 2.0 * 6.0 + 4.0 * 8.0]);
    }

    #[test]
    fn to_json_nesting() {
        let a = t(&[("i", 2), ("j", 2)], &[19.0, 22.0, 43.0, 50.0]);
        assert_eq!(a.to_json().to_string(), "[[19.0,22.0],[43.0,50.0]]");
        let g = PrimeField::mersenne61();
        assert_eq!(Tensor::scalar(g, 63).to_json().to_string(), "63");
    }

    fn naive_reference(
        f: PrimeField,
        tensors: &[Tensor<PrimeField>],
        shared: &IndexLabel,
    ) -> Vec<u64> {
        // Loop over every output entry and shared value, reading entries by
        // explicit multi-indices.
        let out_axes: Vec<Axis> = tensors
            .iter()
            .flat_map(|t| t.axes().iter().filter(|a| &a.label != shared).cloned())
            .collect();
        let l = tensors[0].dim(shared).unwrap();
        let dims: Vec<usize> = out_axes.iter().map(|a| a.dim).collect();
        let total: usize = dims.iter().product();
        let mut idx = vec![0; dims.len()];
        let mut out = Vec::new();
        for _ in 0..total {
            let mut acc = 0;
            for v in 0..l {
                let mut p = 1;
                for t in tensors {
                    let mi: Vec<usize> = t
                        .axes()
                        .iter()
                        .map(|a| {
                            if &a.label == shared {
                                v
                            } else {
                                idx[out_axes.iter().position(|o| o.label == a.label).unwrap()]
                            }
                        })
                        .collect();
                    p = f.mul(p, t.get(&mi).unwrap());
                }
                acc = f.add(acc, p);
            }
            out.push(acc);
            advance(&mut idx, &dims);
        }
        out
    }

    proptest! {
        #[test]
        fn all_ones_contraction_counts_the_shared_dimension(
            l in 1usize..5, ranks in proptest::collection::vec(0usize..3, 1..4)
        ) {
            let f = PrimeField::mersenne61();
            let tensors: Vec<Tensor<PrimeField>> = ranks.iter().enumerate().map(|(ti, r)| {
                let mut axes = vec![Axis::new("s", l)];
                axes.extend((0..*r).map(|k| Axis::new(format!("o{ti}_{k}"), 2)));
                Tensor::filled(f, axes, 1).unwrap()
            }).collect();
            let refs: Vec<&Tensor<PrimeField>> = tensors.iter().collect();
            let out = multiway_contract(&refs, &"s".into()).unwrap();
            prop_assert!(out.data().iter().all(|v| *v == l as u64));
        }

        #[test]
        fn identity_is_neutral(n in 1usize..5, m in 1usize..5, seed in any::<u64>()) {
            let f = PrimeField::mersenne61();
            let mut s = seed;
            let b = Tensor::from_fn(f, vec![Axis::new("j", n), Axis::new("k", m)], |_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                f.from_u64(s >> 3)
            }).unwrap();
            let id = Tensor::from_fn(f, vec![Axis::new("i", n), Axis::new("j", n)], |ix| {
                u64::from(ix[0] == ix[1])
            }).unwrap();
            let c = multiway_contract(&[&id, &b], &"j".into()).unwrap();
            prop_assert_eq!(c.data(), b.data());
        }

        #[test]
        fn kernel_matches_naive_loops(
            l in 1usize..4,
            shapes in proptest::collection::vec(proptest::collection::vec(1usize..4, 0..3), 1..4),
            seed in any::<u64>()
        ) {
            let f = PrimeField::mersenne61();
            let mut s = seed;
            let tensors: Vec<Tensor<PrimeField>> = shapes.iter().enumerate().map(|(ti, dims)| {
                let mut axes: Vec<Axis> = dims.iter().enumerate()
                    .map(|(k, d)| Axis::new(format!("o{ti}_{k}"), *d)).collect();
                axes.insert(ti % (axes.len() + 1), Axis::new("s", l));
                Tensor::from_fn(f, axes, |_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    f.from_u64(s >> 3)
                }).unwrap()
            }).collect();
            let total: usize = tensors.iter().map(|t| t.len()).product();
            prop_assume!(total <= 4096);
            let refs: Vec<&Tensor<PrimeField>> = tensors.iter().collect();
            let fast = multiway_contract(&refs, &"s".into()).unwrap();
            prop_assert_eq!(fast.data().to_vec(), naive_reference(f, &tensors, &"s".into()));
        }
    }
}
