//! Pointwise eleven-class decomposition of the fundamental tensor
//! `F(X,Y,Z) = g((∇_X φ)Y, Z)` of an almost paracontact metric structure.
//!
//! Computations are generic over [`Scalar`]: exact rationals by default,
//! `f64` on request.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod ftensor;
pub mod matrix;
pub mod projectors;
pub mod samples;
pub mod scalar;
pub mod selftest;
pub mod structure;
pub mod tensor;

pub use classifier::{characterization_check, classify, dimension_audit, ClassificationReport, DimensionAudit};
pub use error::{Error, Result};
pub use ftensor::{
    admissible_projection, assemble_from_operators, extract_operators, group_action, inner_product, one_forms, FTensor,
    OperatorFamily,
};
pub use matrix::Matrix;
pub use projectors::{decompose, ComponentDecomposition, CLASS_COUNT};
pub use samples::{example, random_admissible, random_pure, ExampleParams};
pub use scalar::{Rational, Scalar};
pub use structure::{standard_structure, GroupElement, StructureSpace};
pub use tensor::Tensor3;
