//! Underlying-probability grids for dichotomic Bell scenarios.
//!
//! A local hidden-variable model assigns an outcome to every party for every
//! measurement setting at once. Tabulating those joint assignments on a grid
//! turns each observable marginal `P_s(o)` into a partial sum over a line or
//! ribbon of cells, and turns a Bell inequality into a statement about how
//! those lines cover the grid. This crate makes that picture exact:
//!
//! * [`scenario`] fixes the bijection between outcome assignments, grid
//!   coordinates and flat cell indices.
//! * [`underlying`] holds distributions over cells and their marginals.
//! * [`inequality`] expands linear forms over marginals onto cells and
//!   certifies them by entrywise nonnegativity.
//! * [`quantum`] produces marginals from pure states via the Born rule.
//! * [`polytope`] decides whether a marginal set admits any underlying
//!   distribution at all.
//! * [`render`] draws supports and inequalities as text or SVG grids.
//! * [`reproduce`] runs the end-to-end acceptance checks.

pub mod error;
pub mod inequality;
pub mod json;
pub mod polytope;
pub mod quantum;
pub mod render;
pub mod reproduce;
pub mod scalar;
pub mod scenario;
pub mod underlying;

pub use error::{Error, Result};
pub use inequality::{Certificate, CellCoefficients, LinearForm, MarginalTerm, Verdict};
pub use scalar::{Mode, Rational, Scalar};
pub use scenario::{Event, GridIndex, OutcomeAssignment, Outcomes, Scenario, SettingVector};
pub use underlying::{MarginalSet, MarginalTable, UnderlyingDist};
