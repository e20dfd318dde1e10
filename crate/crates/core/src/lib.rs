//! Morrow-Patterson interpolation nodes on the square `[-1, 1]^2`: node
//! construction, the exact cubature rule, the interpolation operator and
//! Lebesgue function evaluation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebkernel;
pub mod cubature;
pub mod error;
pub mod export;
pub mod interp;
pub mod lagrange;
pub mod meshes;
pub mod nodes;
pub mod poly;

pub use error::{Error, Result};
pub use interp::{KernelEvalConfig, KernelMethod, LebesgueReport, MeshSpec, MpInterpolant};
pub use nodes::{NodeFamily, NodeSet, Point2};
