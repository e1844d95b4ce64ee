//! Partition equilibria of a consumer-to-aggregator power signaling game.
//!
//! A consumer with private power need `s ∈ [0, 1]` sends one of finitely many
//! messages to an aggregator, which then allocates power `a ∈ [0, 1]`. The
//! consumer wants `a = s`; the aggregator also pays an exponential grid cost
//! `b·eᵃ`, so it shades allocations downward. Equilibrium signaling schemes
//! are interval partitions of `[0, 1]`, one allocation per cell.
//!
//! Modules, bottom-up:
//!
//! - [`numerics`]: principal-branch Lambert W, bracketed root finding and
//!   adaptive Simpson quadrature.
//! - [`model`]: payoffs, parameters and closed-form cell integrals under the
//!   uniform prior.
//! - [`equilibrium`]: the aggregator's best response, the boundary recursion,
//!   the maximal message count, the shooting solver and an ε-Nash verifier.
//! - [`quantizer`]: alternating best-response dynamics (Lloyd-Max at `b = 0`).
//! - [`experiments`]: the six ex-ante payoff scenarios and bias sweeps.
//! - [`oracle`]: brute-force references that share no code with the solvers.

// `!(a < b)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod quantizer;

pub use equilibrium::{
    best_response_action, equilibrium_profile, forward_partition, max_messages,
    max_messages_detail, phi, phi_inverse, phi_inverse_lambert, pointwise_best_action,
    solve_partition, verify_equilibrium, EquilibriumProfile, MessageCount, Partition,
    VerificationReport, DEFAULT_CELL_CAP, DEFAULT_EPSILON,
};
pub use error::{Error, Result};
pub use experiments::{scenario_payoffs, scenario_payoffs_at, sweep, ScenarioPayoffs, SweepRecord};
pub use model::{Interval, ModelParams};
pub use numerics::Tolerance;
pub use quantizer::{br_dynamics, consumer_boundaries_br, BrDynamicsResult};
