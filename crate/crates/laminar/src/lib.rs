//! Online convex optimization over sequential decision spaces (treeplexes).
//!
//! The crate decomposes regret over a tree-structured decision space into
//! local regrets, one per decision point, and minimizes each with a pluggable
//! local minimizer (regret matching, regret matching+, or projected online
//! gradient descent). On top of that it provides:
//!
//! - two-player zero-sum self-play with certified saddle-point gaps,
//!   including entropy- and l2-regularized variants (quantal response
//!   equilibria are the entropy case);
//! - a best-response-differential (BRD) mode that discounts child losses by
//!   the change in subtree best-response value instead of the current value;
//! - benchmark games (Kuhn poker, Leduc hold'em, Goofspiel) in sequence form
//!   with chance folded into a sparse payoff matrix;
//! - single-agent exploitation of a sampled static opponent with an
//!   anchored quadratic penalty;
//! - brute-force oracles (pure-strategy enumeration, finite differences,
//!   projection KKT checks, rule-level game walkers) used by the test suite.
//!
//! The crate is `no_std` (allocation required); everything is deterministic
//! given its inputs.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod exploit;
pub mod games;
pub mod losses;
pub mod math;
pub mod minimizers;
pub mod oracles;
pub mod solver;
pub mod treeplex;

pub use games::GameInstance;
pub use losses::{PointTerm, SeparableLoss};
pub use minimizers::{LocalLoss, LocalMinimizer, MinimizerKind, StepRule};
pub use solver::{LaminarSolver, RunAverages, Schedule, SelfPlay, SolverMode};
pub use treeplex::{BehavioralStrategy, DomainKind, SequenceFormStrategy, Treeplex};
