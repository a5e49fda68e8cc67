//! Q-factorial toric singularities as finite subgroups of the torus `T^n = R^n / Z^n`.
//!
//! A finite subgroup `G ⊂ T^n` whose only point on each coordinate axis is the origin defines
//! a toric singularity; its minimal log-discrepancy is the smallest coordinate sum of a
//! nonzero element when `T^n` is identified with `[0, 1)^n`. Closed subgroups are encoded
//! dually by integer character lattices, which turns containment, intersection and avoidance
//! of the simplex regions `{x_i > 0, Σ x_i < ε}` into exact integer and rational linear
//! algebra.
//!
//! Everything is exact. There is no floating point anywhere in the crate.

pub mod enumerate;
pub mod error;
pub mod lattice;
pub mod region;
pub mod series;
pub mod singularity;
pub mod torus;

pub use error::{Error, Result};
pub use lattice::{IntMatrix, Rational};
pub use region::{AvoidanceReport, Avoider, Region, SearchBounds};
pub use enumerate::{EnumerationTask, IndexSet};
pub use series::{Constraint, MembershipSemantics, Series, SeriesDatabase};
pub use singularity::{CyclicQuotient, MldResult};
pub use torus::{CharLattice, FiniteSubgroup, HilbertPolynomial, TorusPoint, DEFAULT_CAP};
