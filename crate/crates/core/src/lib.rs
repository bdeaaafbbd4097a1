//! Energy-efficient duration and transmit-power allocation for a
//! three-node two-way relay link (`a <-> r <-> b`).
//!
//! Three transmission strategies are supported: a full-duplex relay with two
//! time slots ([`Strategy::Fd2ts`]), a full-duplex relay with a single
//! simultaneous slot ([`Strategy::Fd1ts`]) and the half-duplex two-slot
//! baseline ([`Strategy::Hd2ts`]). For each one the crate minimises total
//! frame energy under per-link rate demands, using closed-form minimal powers
//! and a 1-D search over the slot durations. Power amplifiers are modelled
//! either as a traditional class-B stage or with envelope tracking.
//!
//! ```
//! use fdtwr::{solve, Scenario, SolverConfig, Strategy};
//!
//! let s = Scenario::reference().with_strategy(Strategy::Fd2ts);
//! let sched = solve(&s, &SolverConfig::default()).unwrap();
//! assert!(sched.t1 + sched.t2 <= s.frame_t);
//! ```
//!
//! Modules, bottom-up: [`model`] (units, channels, PA and circuit power),
//! [`strategies`] (powers, energies, capacities), [`feasibility`] (minimal
//! slot durations), [`solver`], [`oracle`] (brute-force cross-checks) and
//! [`experiments`] (config files, sweeps, CSV, CLI).

// Range checks are written `!(x > 0.0)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod feasibility;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod strategies;

pub use error::{Error, InfeasibleCause, Result};
pub use feasibility::{tmin, FeasibleWindow};
pub use model::{
    ChannelSet, CircuitAccounting, Node, NodeCircuit, PaKind, PaModel, PerNode, Scenario, Schedule,
    Strategy,
};
pub use solver::{solve, SolverConfig};
