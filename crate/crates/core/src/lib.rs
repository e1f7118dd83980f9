//! Automata-based exact real computation on `[0,1]`.
//!
//! Continuous functions are represented three ways: as Büchi automata accepting their
//! graphs, as nondeterministic binary transducers, and as deterministic signed-binary
//! transducers. The [`convert`] module moves between them and every construction is
//! checked against exact piecewise-linear oracles from [`pwl`] and [`corpus`].

pub mod analysis;
pub mod artifact;
pub mod buchi;
pub mod convert;
pub mod corpus;
pub mod digits;
pub mod error;
pub mod pwl;
pub mod transducer;

pub use buchi::{BuchiAutomaton, DetBuchi, OutputTree};
pub use digits::{BinaryWord, Lasso, Rational, SignedWord};
pub use error::{Error, Result};
pub use pwl::PwlFunction;
pub use transducer::{DetFst, Fst, RunSet, Transducer};
