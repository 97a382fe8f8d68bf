//! Error and violation types shared across the crate.

use std::fmt;

use thiserror::Error;

use crate::formula::{Connective, Formula};

/// A single fragment-legality violation.
///
/// Violations are data, not exceptions: a check walks the whole formula and
/// reports everything it finds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// The offending subformula.
    pub node: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// The fragment restricts negation to propositional variables.
    NegationNotOnVariable,
    ConnectiveNotInFragment(Connective),
    DependenceAtomNotInFragment,
    /// The fragment restricts dependence-atom arguments to variables.
    DepArgumentNotVariable,
    /// A dependence-atom argument was checked semantically and is not flat.
    DepArgumentNotFlat,
    /// The syntactic checker cannot decide flatness of this dependence-atom
    /// argument; resolved by [`crate::semantics::fragment_check_semantic`].
    RequiresSemanticCheck,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::NegationNotOnVariable => {
                write!(f, "negation not on a variable: {}", self.node)
            }
            ViolationKind::ConnectiveNotInFragment(c) => {
                write!(f, "connective `{c}` not in fragment: {}", self.node)
            }
            ViolationKind::DependenceAtomNotInFragment => {
                write!(f, "dependence atom not in fragment: {}", self.node)
            }
            ViolationKind::DepArgumentNotVariable => {
                write!(f, "dependence-atom argument is not a variable: {}", self.node)
            }
            ViolationKind::DepArgumentNotFlat => {
                write!(f, "dependence-atom argument is not flat: {}", self.node)
            }
            ViolationKind::RequiresSemanticCheck => {
                write!(f, "dependence-atom argument needs a semantic flatness check: {}", self.node)
            }
        }
    }
}

fn render_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("fragment violation: {}", render_violations(violations))]
    Fragment { violations: Vec<Violation> },

    #[error("the negation rewrite is undefined for `{connective}`")]
    UnsupportedConnective { connective: Connective },

    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),

    #[error("{what} over {size} variables exceeds the cap of {cap}; {hint}")]
    ScopeCapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
        hint: &'static str,
    },

    /// Deciding `->` or `\/` on a team enumerates its subteams; teams beyond
    /// this size are rejected rather than left to run forever.
    #[error("team with {size} members is too large for a subteam scan (limit {limit})")]
    ScanTooLarge { size: usize, limit: usize },

    #[error("team is not a subteam of the translated team")]
    NotSubteam,

    #[error("the valuation does not satisfy the formula")]
    ValuationNotSupporting,

    #[error("inconsistent input formula (no nonempty team satisfies it)")]
    InconsistentInput,

    #[error("candidate budget of {budget} substitutions exceeded")]
    BudgetExceeded { budget: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A postcondition that the underlying theory guarantees failed to hold;
    /// this always indicates a bug in this crate.
    #[error("internal assertion failed: {0}")]
    InternalAssertion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
