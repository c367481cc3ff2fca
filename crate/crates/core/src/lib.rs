//! Probabilistic quantum state separation.
//!
//! A separation sends each of `n` possible input states `ρ_i` to a prescribed
//! target `ρ'_i` whenever it reports success. This crate
//!
//! * decides realizability ([`feasibility`]): Gram-matrix certificates for
//!   pure states and support conditions for arbitrary families,
//! * builds the realizing isometry and its Kraus operators ([`construction`]),
//! * bounds the average failure probability from below ([`bounds`]),
//! * and ships seeded generators and brute-force baselines ([`oracle`]).
//!
//! [`cli`] and [`mod@format`] expose the same functionality over JSON files.

pub mod bounds;
pub mod cli;
pub mod construction;
pub mod error;
pub mod feasibility;
pub mod format;
pub mod oracle;
pub mod qmat;

pub use bounds::{BoundReport, PriorVector};
pub use construction::{IsometryConstruction, KrausChannel};
pub use error::{Error, Result};
pub use feasibility::{FeasibilityCertificate, SeparationInstance, StateSet, SuccessVector};
pub use qmat::{ComplexMatrix, DensityMatrix, GramMatrix, PureState};
