//! Lagrange interpolation of tensor-valued polynomials.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::tensor::Tensor;

/// Evaluations `values[i] = P(points[i])` of a tensor polynomial of degree at
/// most `degree`.
#[derive(Clone, Debug)]
pub struct EvaluationSet<F: Field> {
    field: F,
    points: Vec<F::Elem>,
    values: Vec<Tensor<F>>,
    degree: usize,
}

impl<F: Field> EvaluationSet<F> {
    pub fn new(field: F, points: Vec<F::Elem>, values: Vec<Tensor<F>>, degree: usize) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if points.len() < degree + 1 {
            return Err(Error::InsufficientSurvivors {
                needed: degree + 1,
                available: points.len(),
            });
        }
        for v in &values[1..] {
            if v.axes() != values[0].axes() {
                return Err(Error::Shape("evaluation values differ in shape".into()));
            }
        }
        Ok(EvaluationSet {
            field,
            points,
            values,
            degree,
        })
    }

    pub fn points(&self) -> &[F::Elem] {
        &self.points
    }

    pub fn values(&self) -> &[Tensor<F>] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// Coefficients of the Lagrange basis polynomials for a fixed point set:
/// `coeffs[j][k]` is the `x^k` coefficient of `l_j`.
#[derive(Clone, Debug)]
pub struct LagrangeBasis<F: Field> {
    field: F,
    coeffs: Vec<Vec<F::Elem>>,
}

impl<F: Field> LagrangeBasis<F> {
    /// O(d^2) setup from the master polynomial `prod (x - x_i)` and the
    /// barycentric weights.
    pub fn new(field: F, points: &[F::Elem]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::NoPoints);
        }
        for i in 0..n {
            for j in i + 1..n {
                if points[i] == points[j] {
                    return Err(Error::DuplicatePoints(i, j));
                }
            }
        }
        field.check_interpolation_points(points)?;

        // master[k] is the x^k coefficient; degree n.
        let mut master = vec![field.zero(); n + 1];
        master[0] = field.one();
        let order = if field.is_exact() {
            points.to_vec()
        } else {
            leja_order(field, points)
        };
        for (deg, &p) in order.iter().enumerate() {
            for k in (0..=deg + 1).rev() {
                let shifted = if k > 0 { master[k - 1] } else { field.zero() };
                master[k] = field.sub(shifted, field.mul(p, master[k]));
            }
        }

        let mut coeffs = Vec::with_capacity(n);
        for (j, &pj) in points.iter().enumerate() {
            let mut denom = field.one();
            for (i, &pi) in points.iter().enumerate() {
                if i != j {
                    denom = field.mul(denom, field.sub(pj, pi));
                }
            }
            let weight = field.inv(denom)?;
            // master / (x - pj) by synthetic division, high to low.
            let mut quotient = vec![field.zero(); n];
            let mut carry = master[n];
            for k in (0..n).rev() {
                quotient[k] = carry;
                carry = field.add(master[k], field.mul(carry, pj));
            }
            coeffs.push(quotient.into_iter().map(|q| field.mul(q, weight)).collect());
        }
        Ok(LagrangeBasis { field, coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `x^k` coefficient of `l_j`.
    pub fn coefficient(&self, j: usize, k: usize) -> F::Elem {
        self.coeffs[j][k]
    }

    /// Coefficient `c_k` of the polynomial through `values`.
    pub fn combine(&self, values: &[Tensor<F>], k: usize) -> Result<Tensor<F>> {
        if values.len() != self.coeffs.len() {
            return Err(Error::Shape(format!(
                "{} values for {} basis polynomials",
                values.len(),
                self.coeffs.len()
            )));
        }
        let terms: Vec<(F::Elem, &Tensor<F>)> = self
            .coeffs
            .iter()
            .zip(values)
            .map(|(c, v)| (c[k], v))
            .collect();
        Tensor::linear_combination(&terms)
    }

    pub fn field(&self) -> F {
        self.field
    }
}

/// Greedy Leja ordering: each next point maximizes the product of distances
/// to the points already taken. Keeps partial products of `(x - x_i)` tame.
fn leja_order<F: Field>(field: F, points: &[F::Elem]) -> Vec<F::Elem> {
    let n = points.len();
    let mut taken = vec![false; n];
    let mut score = vec![0.0f64; n];
    let mut out = Vec::with_capacity(n);
    let first = (0..n)
        .max_by(|&a, &b| field.magnitude(points[a]).total_cmp(&field.magnitude(points[b])))
        .expect("non-empty");
    let mut last = first;
    for _ in 0..n {
        taken[last] = true;
        out.push(points[last]);
        let mut best: Option<usize> = None;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            score[i] += field.distance(points[i], points[last]).max(f64::MIN_POSITIVE).ln();
            if best.is_none_or(|b| score[i] > score[b]) {
                best = Some(i);
            }
        }
        match best {
            Some(b) => last = b,
            None => break,
        }
    }
    out
}

/// All coefficients `c_0 .. c_d`, from the first `d + 1` evaluations.
pub fn interpolate<F: Field>(ev: &EvaluationSet<F>) -> Result<Vec<Tensor<F>>> {
    let used = ev.degree + 1;
    let basis = LagrangeBasis::new(ev.field, &ev.points[..used])?;
    let values = &ev.values[..used];
    (0..used).map(|k| basis.combine(values, k)).collect()
}

/// Only the coefficients at `ks`, skipping the rest of the work.
pub fn interpolate_selected<F: Field>(ev: &EvaluationSet<F>, ks: &[u64]) -> Result<Vec<Tensor<F>>> {
    let used = ev.degree + 1;
    for &k in ks {
        if k as usize >= used {
            return Err(Error::ExponentOutOfRange {
                k,
                max: ev.degree as u64,
            });
        }
    }
    let basis = LagrangeBasis::new(ev.field, &ev.points[..used])?;
    let values = &ev.values[..used];
    ks.iter().map(|&k| basis.combine(values, k as usize)).collect()
}

pub fn extract_coefficient<F: Field>(coeffs: &[Tensor<F>], k: u64) -> Result<Tensor<F>> {
    coeffs
        .get(k as usize)
        .cloned()
        .ok_or(Error::ExponentOutOfRange {
            k,
            max: coeffs.len().saturating_sub(1) as u64,
        })
}

/// Entrywise sum of the coefficients at the distinct exponents in `ks`.
pub fn sum_coefficients<F: Field>(coeffs: &[Tensor<F>], ks: &[u64]) -> Result<Tensor<F>> {
    let distinct: BTreeSet<u64> = ks.iter().copied().collect();
    let mut acc: Option<Tensor<F>> = None;
    for k in distinct {
        let c = extract_coefficient(coeffs, k)?;
        acc = Some(match acc {
            None => c,
            Some(a) => a.add(&c)?,
        });
    }
    acc.ok_or_else(|| Error::Shape("empty exponent set".into()))
}

/// Evaluates `sum_k coeffs[k] x^k` by Horner's rule.
pub fn evaluate<F: Field>(coeffs: &[Tensor<F>], x: F::Elem) -> Result<Tensor<F>> {
    let mut iter = coeffs.iter().rev();
    let mut acc = iter
        .next()
        .ok_or_else(|| Error::Shape("empty coefficient list".into()))?
        .clone();
    for c in iter {
        acc = acc.scale(x).add(c)?;
    }
    Ok(acc)
}
