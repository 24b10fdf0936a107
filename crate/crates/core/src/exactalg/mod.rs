//! Exact arithmetic over a number field and certified numerics.

pub mod expr;
pub mod field;
pub mod interval;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub(crate) mod qpoly;
pub mod ratfunc;
pub mod roots;

pub use field::{FieldElem, NumberField};
pub use interval::{ComplexBox, RatInterval};
pub use linalg::{intersect, left_kernel, rank, rref, subspace_sum, SubspaceBasis};
pub use matrix::{Field, Matrix, Ring};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use roots::poly_roots_modulus_lower_bound;
