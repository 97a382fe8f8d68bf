//! Formula AST, the five language fragments, and the syntactic negation
//! rewrite.
//!
//! One AST serves every fragment; fragment legality (where negation may
//! appear, which connectives exist, what dependence atoms may take as
//! arguments) is a separate check that reports violations as data.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result, Violation, ViolationKind};

/// A formula of (extended) propositional team logic.
///
/// `Dep(args, consequent)` is the dependence atom `=(args..., consequent)`:
/// on a team, any two members agreeing on all arguments agree on the
/// consequent. An empty argument list is the constancy atom `=(q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    Bot,
    Top,
    Neg(Box<Formula>),
    Dep(Vec<Formula>, Box<Formula>),
    /// Conjunction `/\`.
    And(Box<Formula>, Box<Formula>),
    /// Tensor (splitting) disjunction `\/`: the team is a union of two
    /// subteams, one satisfying each operand.
    Tensor(Box<Formula>, Box<Formula>),
    /// Intuitionistic disjunction `||`: the whole team satisfies one operand.
    Or(Box<Formula>, Box<Formula>),
    /// Intuitionistic implication `->`, quantifying over subteams.
    Imp(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn dep(args: Vec<Formula>, consequent: Formula) -> Self {
        Formula::Dep(args, Box::new(consequent))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn tensor(l: Formula, r: Formula) -> Self {
        Formula::Tensor(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    /// Variables occurring in the formula, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(name) => {
                if !out.iter().any(|v| v == name) {
                    out.push(name.clone());
                }
            }
            Formula::Bot | Formula::Top => {}
            Formula::Neg(c) => c.collect_vars(out),
            Formula::Dep(args, csq) => {
                for a in args {
                    a.collect_vars(out);
                }
                csq.collect_vars(out);
            }
            Formula::And(l, r)
            | Formula::Tensor(l, r)
            | Formula::Or(l, r)
            | Formula::Imp(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Syntactic under-approximation of flatness.
    ///
    /// Variables, constants and negations are flat; `/\`, `\/` and `->` of
    /// flat formulas are flat. `||` and dependence atoms are excluded even
    /// though particular instances may happen to be semantically flat.
    pub fn is_syntactically_flat(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top | Formula::Neg(_) => true,
            Formula::Dep(..) | Formula::Or(..) => false,
            Formula::And(l, r) | Formula::Tensor(l, r) | Formula::Imp(l, r) => {
                l.is_syntactically_flat() && r.is_syntactically_flat()
            }
        }
    }

    /// Checks membership in a fragment, collecting every violation.
    ///
    /// An empty result means the formula is well-formed in the fragment,
    /// except that for `XPD` a [`ViolationKind::RequiresSemanticCheck`] entry
    /// may remain for dependence-atom arguments whose flatness is not evident
    /// from their shape; use
    /// [`crate::semantics::fragment_check_semantic`] to resolve those.
    pub fn fragment_check(&self, fragment: Fragment) -> Vec<Violation> {
        let mut out = Vec::new();
        self.check_into(fragment, &mut out);
        out
    }

    fn check_into(&self, fragment: Fragment, out: &mut Vec<Violation>) {
        match self {
            Formula::Var(_) | Formula::Bot | Formula::Top => {}
            Formula::Neg(c) => {
                if matches!(fragment, Fragment::Pd | Fragment::Pt)
                    && !matches!(**c, Formula::Var(_))
                {
                    out.push(Violation {
                        kind: ViolationKind::NegationNotOnVariable,
                        node: self.clone(),
                    });
                }
                c.check_into(fragment, out);
            }
            Formula::Dep(args, csq) => match fragment {
                Fragment::InqL => out.push(Violation {
                    kind: ViolationKind::DependenceAtomNotInFragment,
                    node: self.clone(),
                }),
                Fragment::Pd | Fragment::Pt => {
                    for part in args.iter().chain(std::iter::once(&**csq)) {
                        if !matches!(part, Formula::Var(_)) {
                            out.push(Violation {
                                kind: ViolationKind::DepArgumentNotVariable,
                                node: part.clone(),
                            });
                        }
                    }
                }
                Fragment::Xpd => {
                    for part in args.iter().chain(std::iter::once(&**csq)) {
                        if !part.is_syntactically_flat() {
                            out.push(Violation {
                                kind: ViolationKind::RequiresSemanticCheck,
                                node: part.clone(),
                            });
                        }
                        part.check_into(fragment, out);
                    }
                }
                Fragment::Xpt => {
                    for part in args.iter().chain(std::iter::once(&**csq)) {
                        part.check_into(fragment, out);
                    }
                }
            },
            Formula::And(l, r) => {
                l.check_into(fragment, out);
                r.check_into(fragment, out);
            }
            Formula::Tensor(l, r) => {
                if fragment == Fragment::InqL {
                    out.push(Violation {
                        kind: ViolationKind::ConnectiveNotInFragment(Connective::Tensor),
                        node: self.clone(),
                    });
                }
                l.check_into(fragment, out);
                r.check_into(fragment, out);
            }
            Formula::Or(l, r) => {
                if matches!(fragment, Fragment::Pd | Fragment::Xpd) {
                    out.push(Violation {
                        kind: ViolationKind::ConnectiveNotInFragment(Connective::Or),
                        node: self.clone(),
                    });
                }
                l.check_into(fragment, out);
                r.check_into(fragment, out);
            }
            Formula::Imp(l, r) => {
                if matches!(fragment, Fragment::Pd | Fragment::Xpd) {
                    out.push(Violation {
                        kind: ViolationKind::ConnectiveNotInFragment(Connective::Imp),
                        node: self.clone(),
                    });
                }
                l.check_into(fragment, out);
                r.check_into(fragment, out);
            }
        }
    }
}

/// Rewrites a formula into its negation normal form `f~`, semantically the
/// negation of `f`.
///
/// Defined on the `/\`, `\/` fragment (with dependence atoms and unrestricted
/// negation): variables flip to negated variables and back, `top` and `bot`
/// swap, dependence atoms collapse to `bot`, `/\` and `\/` are exchanged by
/// De Morgan duality, and an inner negation is rewritten first and the result
/// rewritten again. The output contains no dependence atom and negation only
/// directly on variables.
pub fn negation_translate(f: &Formula) -> Result<Formula> {
    match f {
        Formula::Var(_) => Ok(Formula::neg(f.clone())),
        Formula::Top => Ok(Formula::Bot),
        Formula::Bot => Ok(Formula::Top),
        Formula::Dep(..) => Ok(Formula::Bot),
        Formula::Neg(c) => match &**c {
            Formula::Var(_) => Ok((**c).clone()),
            other => {
                let inner = negation_translate(other)?;
                negation_translate(&inner)
            }
        },
        Formula::And(l, r) => Ok(Formula::tensor(
            negation_translate(l)?,
            negation_translate(r)?,
        )),
        Formula::Tensor(l, r) => Ok(Formula::and(
            negation_translate(l)?,
            negation_translate(r)?,
        )),
        Formula::Or(..) => Err(Error::UnsupportedConnective {
            connective: Connective::Or,
        }),
        Formula::Imp(..) => Err(Error::UnsupportedConnective {
            connective: Connective::Imp,
        }),
    }
}

/// Binary/unary connective tags, used in violation reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    Neg,
    And,
    Tensor,
    Or,
    Imp,
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            Connective::Neg => "~",
            Connective::And => "/\\",
            Connective::Tensor => "\\/",
            Connective::Or => "||",
            Connective::Imp => "->",
        };
        write!(f, "{token}")
    }
}

/// The five language fragments.
///
/// `Pd` and `Pt` restrict negation to variables and dependence atoms to
/// variable arguments; `InqL` has no tensor and no dependence atoms (negation
/// is the usual shorthand for implication into `bot`); the extended `Xpd` and
/// `Xpt` allow negation everywhere, with dependence-atom arguments required
/// to be flat in `Xpd` and unrestricted in `Xpt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    Pd,
    InqL,
    Pt,
    Xpd,
    Xpt,
}

impl Fragment {
    pub const ALL: [Fragment; 5] = [
        Fragment::Pd,
        Fragment::InqL,
        Fragment::Pt,
        Fragment::Xpd,
        Fragment::Xpt,
    ];

    /// Whether intuitionistic implication belongs to the fragment.
    pub fn has_implication(self) -> bool {
        matches!(self, Fragment::InqL | Fragment::Pt | Fragment::Xpt)
    }

    /// Whether tensor disjunction belongs to the fragment.
    pub fn has_tensor(self) -> bool {
        !matches!(self, Fragment::InqL)
    }

    /// Whether intuitionistic disjunction belongs to the fragment; these are
    /// the fragments whose normal form is an actual disjunction rather than a
    /// component list.
    pub fn has_or(self) -> bool {
        matches!(self, Fragment::InqL | Fragment::Pt | Fragment::Xpt)
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            Fragment::Pd => "pd",
            Fragment::InqL => "inql",
            Fragment::Pt => "pt",
            Fragment::Xpd => "xpd",
            Fragment::Xpt => "xpt",
        };
        write!(f, "{tag}")
    }
}

impl FromStr for Fragment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Fragment> {
        match s.to_ascii_lowercase().as_str() {
            "pd" => Ok(Fragment::Pd),
            "inql" => Ok(Fragment::InqL),
            "pt" => Ok(Fragment::Pt),
            "xpd" => Ok(Fragment::Xpd),
            "xpt" => Ok(Fragment::Xpt),
            other => Err(Error::InvalidArgument(format!(
                "unknown fragment `{other}` (expected pd, inql, pt, xpd or xpt)"
            ))),
        }
    }
}

// Precedence levels for printing, tightest first: ~, /\, \/, ||, ->.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::Tensor(..) => 3,
        Formula::And(..) => 4,
        Formula::Neg(..) => 5,
        Formula::Var(_) | Formula::Bot | Formula::Top | Formula::Dep(..) => 6,
    }
}

fn fmt_prec(f: &Formula, min_prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parens = prec(f) < min_prec;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Var(name) => write!(out, "{name}")?,
        Formula::Bot => write!(out, "bot")?,
        Formula::Top => write!(out, "top")?,
        Formula::Neg(c) => {
            write!(out, "~")?;
            fmt_prec(c, 5, out)?;
        }
        Formula::Dep(args, csq) => {
            write!(out, "=(")?;
            for a in args {
                fmt_prec(a, 1, out)?;
                write!(out, ", ")?;
            }
            fmt_prec(csq, 1, out)?;
            write!(out, ")")?;
        }
        Formula::And(l, r) => {
            fmt_prec(l, 4, out)?;
            write!(out, " /\\ ")?;
            fmt_prec(r, 5, out)?;
        }
        Formula::Tensor(l, r) => {
            fmt_prec(l, 3, out)?;
            write!(out, " \\/ ")?;
            fmt_prec(r, 4, out)?;
        }
        Formula::Or(l, r) => {
            fmt_prec(l, 2, out)?;
            write!(out, " || ")?;
            fmt_prec(r, 3, out)?;
        }
        Formula::Imp(l, r) => {
            fmt_prec(l, 2, out)?;
            write!(out, " -> ")?;
            fmt_prec(r, 1, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 1, f)
    }
}
