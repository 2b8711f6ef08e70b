//! Finite-model toolkit for team semantics.
//!
//! The crate evaluates first-order formulas extended with inclusion (and
//! other) dependency atoms over finite structures, both by the definitional
//! team-semantics clauses (`team_eval`) and, for the fixed-point fragment,
//! by Knaster-Tarski iteration (`fixpoint`). The `translate` module carries
//! formulas between the two fragments; `efgame` implements the associated
//! Spoiler/Duplicator game; `oracles` holds independent graph-theoretic
//! reference implementations; `suite` bundles the end-to-end checks.

pub mod enumerate;
pub mod error;
pub mod syntax;
pub mod structures;
pub mod team_eval;
pub mod fixpoint;
pub mod translate;
pub mod efgame;
pub mod oracles;
pub mod suite;

pub use error::EvalError;
pub use structures::{Assignment, ChoiceFunction, Element, Relation, Structure, Team};
pub use syntax::{Formula, FreshNames, Signature, Term};
