//! Coded computing for sliced tensor network contraction.

pub mod coding;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod interpolation;
pub mod netfile;
pub mod network;
pub mod oracle;
pub mod simulator;
pub mod tensor;

pub use coding::{plan_best, CodeScheme, DecodeGeometry, EncodedNetwork, SchemeKind};
pub use error::{Error, Result};
pub use field::{ComplexField, Field, FieldKind, PrimeField, RealField};
pub use network::{SliceAssignment, SlicedIndex, SlicingPlan, TensorNetwork, ValidationReport};
pub use tensor::{Axis, IndexLabel, Tensor};
