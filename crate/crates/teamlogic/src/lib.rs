//! Team semantics for propositional logics of dependence.
//!
//! Formulas are evaluated on *teams* (sets of valuations) rather than single
//! valuations. The crate provides the formula language and its five fragments
//! (`PD`, `InqL`, `PT` and the extended `XPD`, `XPT`), a bitset team evaluator,
//! validity and consequence checking, canonical team formulas and disjunctive
//! normal forms, flat-substitution machinery, Prucnal-style projective
//! unifiers, and a constructive admissibility engine that either derives a
//! rule or exhibits a flat substitution refuting it.

pub mod admissibility;
pub mod cli;
pub mod error;
pub mod formula;
pub mod generate;
pub mod normalform;
pub mod parser;
pub mod projectivity;
pub mod semantics;
pub mod substitution;
pub mod team;

pub use error::{Error, Result, Violation, ViolationKind};
pub use formula::{negation_translate, Connective, Formula, Fragment};
pub use normalform::{flat_characterization, maximal_teams, normal_form, theta, NormalForm};
pub use parser::parse;
pub use semantics::{
    consequence, equivalent, evaluate, is_consistent, is_flat, is_valid, singleton_support,
    truth_family, Caps,
};
pub use substitution::Substitution;
pub use team::{Scope, Team, TeamFamily, Valuation};
