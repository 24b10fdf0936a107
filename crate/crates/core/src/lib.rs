//! Linear relations among solutions of Mahler systems f(z) = A(z) f(z^q)
//! and among their values at algebraic points.

pub mod automaton;
pub mod error;
pub mod exactalg;
pub mod fixtures;
pub mod relations;
pub mod series;
pub mod system;
pub mod values;

pub use error::{Error, Result};
pub use relations::{find_relations, RelationBasis, SearchOptions};
pub use series::{inner_valuation, CoefficientStream, Valuation};
pub use system::{Classification, MahlerSystem, PointClass};
