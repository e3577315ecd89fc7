//! JSON network description: field, label dimensions, tensors (explicit or
//! seeded random data) and the list of labels to slice.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Field, FieldKind};
use crate::network::TensorNetwork;
use crate::tensor::{Axis, IndexLabel, Tensor};

pub const SCHEMA_VERSION: u32 = 1;

/// Range of the seeded integer data.
pub const RANDOM_LO: i64 = 0;
pub const RANDOM_HI: i64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub schema_version: u32,
    #[serde(default = "default_field")]
    pub field: String,
    pub dims: BTreeMap<String, usize>,
    pub tensors: Vec<TensorSpec>,
    #[serde(default)]
    pub slice: Vec<String>,
}

fn default_field() -> String {
    "gf".to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub id: String,
    pub axes: Vec<String>,
    pub data: DataSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSpec {
    Explicit(Vec<Value>),
    Random { random: RandomSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub seed: u64,
    #[serde(default = "default_distribution")]
    pub distribution: String,
}

fn default_distribution() -> String {
    "uniform-int".to_string()
}

impl NetworkSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: NetworkSpec = serde_json::from_str(text).map_err(|e| {
            Error::SpecFile(format!("line {} column {}: {}", e.line(), e.column(), e))
        })?;
        if spec.schema_version != SCHEMA_VERSION {
            return Err(Error::SpecFile(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                spec.schema_version
            )));
        }
        Ok(spec)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn field_kind(&self) -> Result<FieldKind> {
        self.field.parse()
    }

    pub fn slice_labels(&self) -> Vec<IndexLabel> {
        self.slice.iter().map(|s| IndexLabel::from(s.as_str())).collect()
    }

    /// Materializes the network. `stream` selects an independent random
    /// stream for every seeded tensor, so one global seed reshuffles all data.
    pub fn build<F: Field>(&self, field: F, stream: u64) -> Result<TensorNetwork<F>> {
        let dims: BTreeMap<IndexLabel, usize> = self
            .dims
            .iter()
            .map(|(l, d)| (IndexLabel::from(l.as_str()), *d))
            .collect();
        let mut tensors = Vec::with_capacity(self.tensors.len());
        for t in &self.tensors {
            let axes = t
                .axes
                .iter()
                .map(|l| {
                    let label = IndexLabel::from(l.as_str());
                    dims.get(&label)
                        .map(|d| Axis::new(label.clone(), *d))
                        .ok_or_else(|| {
                            Error::SpecFile(format!(
                                "tensor `{}`: axis `{l}` has no entry in dims",
                                t.id
                            ))
                        })
                })
                .collect::<Result<Vec<Axis>>>()?;
            let volume: usize = axes.iter().map(|a| a.dim).product();
            let data = match &t.data {
                DataSpec::Explicit(values) => {
                    if values.len() != volume {
                        let shape: Vec<String> = axes.iter().map(|a| format!("{}:{}", a.label, a.dim)).collect();
                        return Err(Error::SpecFile(format!(
                            "tensor `{}`: data has {} values but shape [{}] needs {volume}",
                            t.id,
                            values.len(),
                            shape.join(",")
                        )));
                    }
                    values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            field.elem_from_json(v).map_err(|e| {
                                Error::SpecFile(format!("tensor `{}` data[{i}]: {e}", t.id))
                            })
                        })
                        .collect::<Result<Vec<F::Elem>>>()?
                }
                DataSpec::Random { random } => {
                    if random.distribution != "uniform-int" {
                        return Err(Error::SpecFile(format!(
                            "tensor `{}`: unknown distribution `{}` (only uniform-int)",
                            t.id, random.distribution
                        )));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(random.seed);
                    rng.set_stream(stream);
                    (0..volume)
                        .map(|_| field.sample_int(&mut rng, RANDOM_LO, RANDOM_HI))
                        .collect()
                }
            };
            tensors.push((t.id.clone(), Tensor::new(field, axes, data)?));
        }
        TensorNetwork::new(field, dims, tensors)
    }

    /// Spec with explicit data for every tensor.
    pub fn from_network<F: Field>(net: &TensorNetwork<F>, slice: &[IndexLabel]) -> Self {
        let field = net.field();
        NetworkSpec {
            schema_version: SCHEMA_VERSION,
            field: field.kind().to_string(),
            dims: net.dims().iter().map(|(l, d)| (l.to_string(), *d)).collect(),
            tensors: net
                .tensors()
                .iter()
                .map(|(id, t)| TensorSpec {
                    id: id.clone(),
                    axes: t.labels().map(|l| l.to_string()).collect(),
                    data: DataSpec::Explicit(t.data().iter().map(|v| field.elem_to_json(*v)).collect()),
                })
                .collect(),
            slice: slice.iter().map(|l| l.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ComplexField, PrimeField};

    const MATMUL: &str = r#"{
        "schema_version": 1,
        "field": "gf",
        "dims": {"i": 2, "j": 2, "k": 2},
        "tensors": [
            {"id": "A", "axes": ["i", "j"], "data": [1, 2, 3, 4]},
            {"id": "B", "axes": ["j", "k"], "data": [5, 6, 7, 8]}
        ],
        "slice": ["j"]
    }"#;

    #[test]
    fn parses_and_contracts() {
        let spec = NetworkSpec::parse(MATMUL).unwrap();
        assert_eq!(spec.field_kind().unwrap(), FieldKind::default());
        let net = spec.build(PrimeField::mersenne61(), 0).unwrap();
        assert_eq!(net.full_contract(None).unwrap().data(), &[19, 22, 43, 50]);
        assert_eq!(spec.slice_labels(), vec![IndexLabel::from("j")]);
    }

    #[test]
    fn shape_and_dims_diagnostics() {
        let bad = MATMUL.replace("[5, 6, 7, 8]", "[5, 6, 7]");
        let err = NetworkSpec::parse(&bad)
            .unwrap()
            .build(PrimeField::mersenne61(), 0)
            .unwrap_err();
        assert!(err.to_string().contains("data has 3 values"), "{err}");
        let bad = MATMUL.replace(r#""k": 2"#, r#""q": 2"#);
        let err = NetworkSpec::parse(&bad)
            .unwrap()
            .build(PrimeField::mersenne61(), 0)
            .unwrap_err();
        assert!(err.to_string().contains("axis `k`"), "{err}");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = NetworkSpec::parse("{\n  \"schema_version\": 1,\n  \"dims\": 3\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = NetworkSpec::parse(&MATMUL.replace("\"schema_version\": 1", "\"schema_version\": 9")).unwrap_err();
        assert!(err.to_string().contains("schema_version 9"));
    }

    #[test]
    fn random_data_is_seeded() {
        let text = r#"{"schema_version": 1, "field": "gf", "dims": {"a": 3},
            "tensors": [{"id": "T", "axes": ["a"], "data": {"random": {"seed": 4}}},
                        {"id": "U", "axes": ["a"], "data": {"random": {"seed": 4, "distribution": "uniform-int"}}}]}"#;
        let spec = NetworkSpec::parse(text).unwrap();
        let f = PrimeField::mersenne61();
        let a = spec.build(f, 0).unwrap();
        let b = spec.build(f, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tensor("T"), a.tensor("U"));
        assert!(a.tensor("T").unwrap().data().iter().all(|v| *v <= 100));
        let c = spec.build(f, 1).unwrap();
        assert_ne!(a.tensor("T"), c.tensor("T"));
    }

    #[test]
    fn round_trip_is_exact() {
        let text = r#"{"schema_version": 1, "field": "gf", "dims": {"a": 3, "b": 2},
            "tensors": [{"id": "T", "axes": ["a", "b"], "data": {"random": {"seed": 9}}},
                        {"id": "U", "axes": ["b"], "data": [1, -1]}]}"#;
        let f = PrimeField::mersenne61();
        let net = NetworkSpec::parse(text).unwrap().build(f, 3).unwrap();
        let back = NetworkSpec::from_network(&net, &[IndexLabel::from("b")]);
        let again = NetworkSpec::parse(&back.to_json_string()).unwrap();
        assert_eq!(again, back);
        assert_eq!(again.build(f, 0).unwrap(), net);

        let cnet = NetworkSpec::parse(&text.replace("\"gf\"", "\"c128\"")).unwrap().build(ComplexField, 0).unwrap();
        let cback = NetworkSpec::from_network(&cnet, &[]);
        assert_eq!(NetworkSpec::parse(&cback.to_json_string()).unwrap().build(ComplexField, 0).unwrap(), cnet);
    }
}
