//! Mode-frequency hopping (MFH) anti-jamming analysis for cognitive radio
//! networks.
//!
//! Secondary users hop over an N-frequency × L-mode grid. Attackers jam a
//! user only when they land on the same frequency *and* the same OAM mode.
//! The crate provides:
//!
//! * [`specfun`]: gamma functions and adaptive quadrature,
//! * [`channel`]: the Nakagami-m fading model and SINR formulas,
//! * [`analytics`]: closed-form false-alarm, outage and capacity expressions
//!   with numeric oracles,
//! * [`montecarlo`]: a seeded slot-level simulator of the whole system,
//! * [`cli`]: configuration, sweeps, figure reproduction and CSV output.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod channel;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod specfun;

pub use error::{Error, Result};
