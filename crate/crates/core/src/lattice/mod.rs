//! Exact integer and rational linear algebra underlying every other module.

pub mod fm;
pub mod matrix;
pub mod rational;

pub use fm::{fm_feasible, Feasibility, LinearSystem};
pub use matrix::{hnf, lattice_contains, saturation_data, snf, IntMatrix, Snf};
pub use rational::{format_rational, parse_rational, Rational};
