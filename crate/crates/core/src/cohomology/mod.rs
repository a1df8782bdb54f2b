//! A finite model of the fiber cohomology `H*(X)` and of `H*(X^r)` through
//! tensor words, used to evaluate transforms concretely.

mod ring;
mod tensor;

pub use ring::{CohClass, CohomRing, RESERVED_NAMES, TOP_DEGREE};
pub use tensor::{small_diagonal_push, TensorClass};
