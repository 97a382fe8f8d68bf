//! Prucnal-style projective unifiers and the projectivity checks.
//!
//! A projective unifier for `f` is a substitution that makes `f` valid while
//! `f` itself forces every variable to coincide with its image. The Prucnal
//! construction reads the images off a single supporting valuation `v`:
//! a variable false under `v` maps to `f /\ p`, a variable true under `v`
//! maps to `f -> p` (implication style) or `~f \/ p` (tensor style, for the
//! fragments without implication). Consistent flat formulas have such a
//! unifier; non-flat formulas have none.

use crate::error::{Error, Result};
use crate::formula::{negation_translate, Formula, Fragment};
use crate::semantics::{consequence, is_consistent, is_flat, is_valid, singleton_support, Caps};
use crate::substitution::Substitution;
use crate::team::{Scope, Valuation};

/// Which shape the unifier images take for variables true under the witness
/// valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnifierStyle {
    /// `f -> p`; needs implication in the target fragment.
    Implication,
    /// `~f \/ p`, with the negation rewritten into negation normal form so
    /// the image stays inside the tensor fragment.
    Tensor,
}

impl UnifierStyle {
    /// The style matching a fragment's connectives.
    pub fn for_fragment(fragment: Fragment) -> UnifierStyle {
        if fragment.has_implication() {
            UnifierStyle::Implication
        } else {
            UnifierStyle::Tensor
        }
    }
}

/// The two defining conditions of a projective unifier, checked semantically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectivityChecks {
    /// `σ(f)` is valid.
    pub unifies: bool,
    /// For every variable `p` of `f`: `f, σ(p) |= p` and `f, p |= σ(p)`.
    pub fixes_variables: bool,
}

/// Outcome of a projectivity query.
#[derive(Debug, Clone)]
pub struct ProjectivityReport {
    pub formula: Formula,
    /// Present only when both checks pass.
    pub unifier: Option<Substitution>,
    pub checks: ProjectivityChecks,
    /// The supporting valuation the construction used, if one was involved.
    pub witness: Option<Valuation>,
}

/// Builds the Prucnal unifier of `f` at a supporting valuation.
///
/// The domain is exactly the variables of `f`; everything else stays fixed.
pub fn prucnal_unifier(
    f: &Formula,
    v: &Valuation,
    style: UnifierStyle,
    caps: &Caps,
) -> Result<Substitution> {
    let scope = Scope::of_formula(f);
    let support = singleton_support(f, v.scope(), caps)?;
    if !support.contains_code(v.code()) {
        return Err(Error::ValuationNotSupporting);
    }
    let mut subst = Substitution::identity();
    for var in scope.vars() {
        let bit = v.value(var).ok_or_else(|| {
            Error::ScopeMismatch(format!(
                "valuation over `{}` does not assign `{var}`",
                v.scope()
            ))
        })?;
        let image = if bit {
            match style {
                UnifierStyle::Implication => Formula::imp(f.clone(), Formula::var(var)),
                UnifierStyle::Tensor => {
                    Formula::tensor(negation_translate(f)?, Formula::var(var))
                }
            }
        } else {
            Formula::and(f.clone(), Formula::var(var))
        };
        subst.insert(var, image);
    }
    Ok(subst)
}

/// Checks the projectivity conditions of a candidate unifier for `f`.
pub fn check_projective(
    f: &Formula,
    s: &Substitution,
    caps: &Caps,
) -> Result<ProjectivityReport> {
    let unifies = is_valid(&s.apply(f), caps)?;
    let mut fixes_variables = true;
    for var in f.free_vars() {
        let p = Formula::var(&var);
        let image = s.image(&var);
        if !consequence(&[f.clone(), image.clone()], &p, caps)?
            || !consequence(&[f.clone(), p], &image, caps)?
        {
            fixes_variables = false;
            break;
        }
    }
    let checks = ProjectivityChecks { unifies, fixes_variables };
    Ok(ProjectivityReport {
        formula: f.clone(),
        unifier: if unifies && fixes_variables { Some(s.clone()) } else { None },
        checks,
        witness: None,
    })
}

/// Returns a projective unifier among the flat substitutions, or `None`.
///
/// Consistent flat formulas always have one: the Prucnal unifier at the
/// lowest-code supporting valuation, in the style the fragment affords. For
/// non-flat formulas no flat unifier exists, so the answer `None` is exact.
/// Inconsistent input is rejected.
pub fn projective_unifier(
    f: &Formula,
    fragment: Fragment,
    caps: &Caps,
) -> Result<Option<Substitution>> {
    if !is_consistent(f, caps)? {
        return Err(Error::InconsistentInput);
    }
    if !is_flat(f, caps)? {
        return Ok(None);
    }
    let scope = Scope::of_formula(f);
    let support = singleton_support(f, &scope, caps)?;
    let code = support.member_codes().into_iter().next().ok_or_else(|| {
        Error::InternalAssertion(format!("consistent formula `{f}` has empty support"))
    })?;
    let witness = Valuation::new(scope, code)?;
    let subst = prucnal_unifier(f, &witness, UnifierStyle::for_fragment(fragment), caps)?;
    let report = check_projective(f, &subst, caps)?;
    if report.unifier.is_none() {
        return Err(Error::InternalAssertion(format!(
            "constructed unifier for flat `{f}` fails projectivity: {:?}",
            report.checks
        )));
    }
    Ok(Some(subst))
}
