//! Nontermination proving for conjunctive linear lasso programs.
//!
//! A lasso program is a stem relation followed by a loop relation, both
//! conjunctions of linear inequalities over current and next state. This
//! crate synthesizes geometric nontermination certificates `(x0, x1, y, λ)`
//! whose induced execution `x0, x1, x1+y, x1+(1+λ)y, …` never leaves the
//! loop, checks such certificates exactly over the rationals, unrolls them
//! into witness prefixes, converts them into verified polyhedral recurrence
//! sets, and exports the symbolic-λ conditions as SMT-LIB2 `QF_NRA` scripts.
//!
//! All arithmetic is exact; there is no floating point anywhere on a
//! certificate-relevant path. All types are immutable values after
//! construction and safe to share across threads.

pub mod certs;
pub mod eigen;
pub mod linalg;
pub mod lp;
pub mod parser;
pub mod program;
pub mod rational;
pub mod smtlib;
pub mod synth;
pub mod witness;

pub use linalg::{RationalMatrix, RationalVector};
pub use program::{LassoProgram, LinearRelation, ModelError};
pub use rational::Rational;
pub use witness::{CheckReport, Gnta, RecurrenceSet, WitnessPrefix};
