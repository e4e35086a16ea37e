//! Information bounds for quantum instruments: Holevo-type upper bounds,
//! Hall-transformed lower bounds, and accessible information.

pub mod accinfo;
pub mod bounds;
pub mod entropy;
pub mod error;
pub mod hall;
pub mod instrument;
pub mod matrix;
pub mod scenarios;
pub mod states;

pub use accinfo::{accessible_info, projective_grid_oracle, AccessibleInfo};
pub use bounds::{full_report, BoundsReport, InvariantCheck};
pub use error::{Error, Result};
pub use instrument::{Instrument, Operation, Povm};
pub use matrix::{HermitianMatrix, SquareMatrix, C64};
pub use scenarios::Scenario;
pub use states::{DensityMatrix, Ensemble, ProbVector};
