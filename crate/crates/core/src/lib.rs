//! Exact computational group theory over GL2(Z/NZ), aimed at one question:
//! how many K-rational points with a given j-invariant does a modular curve
//! X_H have, as the mod-N Galois image varies?
//!
//! Everything is integer arithmetic and finite enumeration: no floating
//! point, no randomness in any counting path, and every whole-group scan is
//! schedule-independent under parallel execution.
//!
//! Layout:
//! - [`zmod`]: levels, residues, 2x2 matrices, valuations, CRT.
//! - [`proj`]: the projective line over Z/p^k Z and the GL2 action.
//! - [`group`]: subgroup closure, double cosets, subgroup lattices.
//! - [`standard`]: Borel, split/nonsplit Cartan, CM Cartan families.
//! - [`count`]: the point-counting formulas and derived tables.

pub mod config;
pub mod count;
pub mod error;
pub mod group;
pub mod proj;
pub mod standard;
pub mod zmod;

pub use config::{Budgets, ExecCfg};
pub use error::{Error, Result};
