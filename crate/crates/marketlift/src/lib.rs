//! Market clearing for nonconvex electricity auctions.
//!
//! The pipeline: parse a network/fleet instance, build either the exact
//! mixed-binary unit-commitment program or its doubly-nonnegative (DNN)
//! semidefinite relaxation, solve, and derive uniform prices from the dual
//! of the relaxation via the envelope theorem. Settlement then quantifies
//! lost opportunity cost (LOC) of every generator under a given price
//! scheme and reports side payments.
//!
//! Modules mirror the stages: [`instance`] (I/O and shift factors),
//! [`model`]/[`rhs`] (solver-agnostic constraint store), [`solver`]
//! (MILP and conic backends), [`mbqp`] (generic lifting machinery),
//! [`dcuc`]/[`acuc`] (model builders), [`pricing`] (prices, best response,
//! settlement), and [`sweep`] (multiplier sweeps and table emission).

pub mod acuc;
pub mod dcuc;
pub mod error;
pub mod instance;
pub mod mbqp;
pub mod model;
pub mod pricing;
pub mod rhs;
pub mod solver;
pub mod sweep;

pub use error::Error;
