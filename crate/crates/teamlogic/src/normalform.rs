//! Canonical team formulas and the disjunctive normal form.
//!
//! For a team `X` on a scope, `theta(X)` is the formula whose satisfying
//! teams are exactly the subteams of `X`. Every formula is then covered by
//! the thetas of the maximal satisfying teams: each covers the formula from
//! below, and every satisfying team lies under one of them. In the fragments
//! with `||` the formula is moreover equivalent to the disjunction of its
//! components.

use crate::error::{Error, Result};
use crate::formula::{Formula, Fragment};
use crate::semantics::{equivalent, evaluate, is_consistent, is_flat, is_valid, truth_family, Caps};
use crate::team::{Scope, Team, TeamFamily};

/// The literal `p` or `~p` according to the valuation bit.
fn literal(var: &str, bit: bool) -> Formula {
    if bit {
        Formula::var(var)
    } else {
        Formula::neg(Formula::var(var))
    }
}

/// The conjunction of literals describing one valuation, in scope order.
fn valuation_conjunction(scope: &Scope, code: u64) -> Formula {
    scope
        .vars()
        .iter()
        .enumerate()
        .map(|(i, v)| literal(v, code >> i & 1 == 1))
        .reduce(Formula::and)
        .unwrap_or(Formula::Top)
}

/// The canonical formula of a team: satisfied by exactly the subteams of `X`.
///
/// The empty team yields `bot`. For `pd`/`xpd` the formula is a tensor of
/// valuation conjunctions (one disjunct per member, in code order); for the
/// other fragments it is a double-negated `||`-disjunction of the same
/// conjunctions. The two renderings are semantically equivalent.
pub fn theta(team: &Team, fragment: Fragment) -> Formula {
    let codes = team.member_codes();
    if codes.is_empty() {
        return Formula::Bot;
    }
    let scope = team.scope();
    let conjunctions = codes.into_iter().map(|c| valuation_conjunction(scope, c));
    match fragment {
        Fragment::Pd | Fragment::Xpd => {
            conjunctions.reduce(Formula::tensor).expect("nonempty team")
        }
        Fragment::InqL | Fragment::Pt | Fragment::Xpt => {
            let disjunction = conjunctions.reduce(Formula::or).expect("nonempty team");
            Formula::neg(Formula::neg(disjunction))
        }
    }
}

/// The nonempty, inclusion-maximal members of a downward-closed family.
/// Empty exactly when the family is `{∅}`.
pub fn maximal_teams(family: &TeamFamily) -> Vec<Team> {
    let valuations = family.scope().valuation_count() as u64;
    let mut out = Vec::new();
    for &code in family.codes() {
        if code == 0 {
            continue;
        }
        // Maximal in a downward-closed family: no one-member extension stays
        // inside.
        let extendable = (0..valuations)
            .filter(|b| code >> b & 1 == 0)
            .any(|b| family.contains_code(code | 1 << b));
        if !extendable {
            out.push(Team::from_family_code(family.scope().clone(), code).expect("stored code"));
        }
    }
    out
}

/// The meta-disjunction decomposition of a formula into canonical team
/// components.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub scope: Scope,
    /// Maximal satisfying teams, in ascending bitset order. Empty iff the
    /// formula is inconsistent.
    pub components: Vec<Team>,
    pub fragment: Fragment,
    /// `theta`-disjunction for the fragments with `||`; `None` for `pd` and
    /// `xpd`, whose decomposition lives at the meta level.
    pub formula: Option<Formula>,
}

impl NormalForm {
    pub fn component_thetas(&self) -> Vec<Formula> {
        self.components.iter().map(|t| theta(t, self.fragment)).collect()
    }
}

/// Computes the normal form of a formula over its own variables and verifies
/// the decomposition: every component satisfies the formula, every satisfying
/// team lies under some component, and in the `||`-fragments the formula is
/// equivalent to the disjunction of the component thetas.
pub fn normal_form(f: &Formula, fragment: Fragment, caps: &Caps) -> Result<NormalForm> {
    let scope = Scope::of_formula(f);
    let family = truth_family(f, &scope, caps)?;
    let components = maximal_teams(&family);

    for component in &components {
        if !evaluate(component, f, caps)? {
            return Err(Error::InternalAssertion(format!(
                "normal-form component {component} does not satisfy `{f}`"
            )));
        }
    }
    for &code in family.codes() {
        if code == 0 {
            // The empty team sits below everything, including the empty
            // decomposition of an inconsistent formula.
            continue;
        }
        let covered = components
            .iter()
            .any(|c| c.family_code().is_some_and(|max| code & !max == 0));
        if !covered {
            return Err(Error::InternalAssertion(format!(
                "satisfying team {code:#b} of `{f}` lies under no component"
            )));
        }
    }

    let formula = if fragment.has_or() {
        let disjunction = components
            .iter()
            .map(|t| theta(t, fragment))
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot);
        if !equivalent(f, &disjunction, caps)? {
            return Err(Error::InternalAssertion(format!(
                "`{f}` is not equivalent to its normal form `{disjunction}`"
            )));
        }
        Some(disjunction)
    } else {
        None
    };

    Ok(NormalForm { scope, components, fragment, formula })
}

/// The four equivalent faces of flatness for a consistent formula.
#[derive(Debug, Clone)]
pub struct FlatnessReport {
    /// True on a team iff true on each member singleton.
    pub flat: bool,
    /// The unique maximal satisfying team, when the normal form has a single
    /// component.
    pub single_theta: Option<Team>,
    /// Equivalent to its own double negation.
    pub double_neg_equiv: bool,
    /// `f \/ ~f` is valid.
    pub tensor_excluded_middle: bool,
}

/// Computes all four flatness characterizations independently and checks that
/// they agree. Defined for consistent formulas only.
pub fn flat_characterization(f: &Formula, caps: &Caps) -> Result<FlatnessReport> {
    if !is_consistent(f, caps)? {
        return Err(Error::InconsistentInput);
    }
    let flat = is_flat(f, caps)?;
    let nf = normal_form(f, Fragment::Xpt, caps)?;
    let single_theta = if nf.components.len() == 1 {
        Some(nf.components[0].clone())
    } else {
        None
    };
    let double_neg_equiv = equivalent(f, &Formula::neg(Formula::neg(f.clone())), caps)?;
    let tensor_excluded_middle =
        is_valid(&Formula::tensor(f.clone(), Formula::neg(f.clone())), caps)?;

    let verdicts = [flat, single_theta.is_some(), double_neg_equiv, tensor_excluded_middle];
    if verdicts.iter().any(|&v| v != flat) {
        return Err(Error::InternalAssertion(format!(
            "flatness characterizations disagree on `{f}`: {verdicts:?}"
        )));
    }
    Ok(FlatnessReport { flat, single_theta, double_neg_equiv, tensor_excluded_middle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn f(s: &str) -> Formula {
        parse(s, None).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    fn scope(vars: &[&str]) -> Scope {
        Scope::new(vars.iter().copied()).unwrap()
    }

    #[test]
    fn theta_of_empty_team_is_bot() {
        let team = Team::empty(scope(&["p"]));
        for fragment in Fragment::ALL {
            assert_eq!(theta(&team, fragment), Formula::Bot);
        }
    }

    #[test]
    fn theta_renderings_on_a_singleton() {
        let team = Team::singleton(scope(&["p"]), 1).unwrap();
        assert_eq!(theta(&team, Fragment::Pd), f("p"));
        assert_eq!(theta(&team, Fragment::InqL), f("~~p"));
        let team = Team::singleton(scope(&["p", "q"]), 0b01).unwrap();
        assert_eq!(theta(&team, Fragment::Pd), f("p /\\ ~q"));
    }

    #[test]
    fn theta_renderings_are_equivalent() {
        let s = scope(&["p", "q"]);
        for code in 0..16u64 {
            let team = Team::from_family_code(s.clone(), code).unwrap();
            assert!(equivalent(
                &theta(&team, Fragment::Pd),
                &theta(&team, Fragment::InqL),
                &caps()
            )
            .unwrap());
        }
    }

    #[test]
    fn maximal_teams_examples() {
        let s = scope(&["p"]);
        let fam = TeamFamily::from_sorted_codes(s.clone(), vec![0b00, 0b01, 0b10]);
        let max: Vec<u64> = maximal_teams(&fam).iter().filter_map(Team::family_code).collect();
        assert_eq!(max, vec![0b01, 0b10]);

        let all = TeamFamily::from_sorted_codes(s.clone(), vec![0b00, 0b01, 0b10, 0b11]);
        let max: Vec<u64> = maximal_teams(&all).iter().filter_map(Team::family_code).collect();
        assert_eq!(max, vec![0b11]);

        let trivial = TeamFamily::from_sorted_codes(s, vec![0b00]);
        assert!(maximal_teams(&trivial).is_empty());
    }

    #[test]
    fn normal_form_of_inquisitive_excluded_middle() {
        let nf = normal_form(&f("p || ~p"), Fragment::InqL, &caps()).unwrap();
        let codes: Vec<u64> = nf.components.iter().filter_map(Team::family_code).collect();
        assert_eq!(codes, vec![0b01, 0b10]);
        assert_eq!(nf.formula.unwrap(), f("~~~p || ~~p"));
    }

    #[test]
    fn normal_form_of_constancy() {
        let nf = normal_form(&f("=(p)"), Fragment::Pd, &caps()).unwrap();
        let thetas = nf.component_thetas();
        assert_eq!(thetas, vec![f("~p"), f("p")]);
        assert!(nf.formula.is_none());
    }

    #[test]
    fn normal_form_of_top_is_the_full_team() {
        let nf = normal_form(&f("top \\/ p"), Fragment::Pd, &caps()).unwrap();
        assert_eq!(nf.components.len(), 1);
        assert_eq!(nf.components[0], Team::full(scope(&["p"])));
    }

    #[test]
    fn normal_form_of_inconsistent_formula_is_empty() {
        let nf = normal_form(&f("p /\\ ~p"), Fragment::InqL, &caps()).unwrap();
        assert!(nf.components.is_empty());
        assert_eq!(nf.formula.unwrap(), Formula::Bot);
    }

    #[test]
    fn flat_characterization_examples() {
        let report = flat_characterization(&f("p /\\ q"), &caps()).unwrap();
        assert!(report.flat && report.double_neg_equiv && report.tensor_excluded_middle);
        assert_eq!(report.single_theta.unwrap().member_codes(), vec![0b11]);

        let report = flat_characterization(&f("p || ~p"), &caps()).unwrap();
        assert!(!report.flat && !report.double_neg_equiv && !report.tensor_excluded_middle);
        assert!(report.single_theta.is_none());

        let report = flat_characterization(&f("=(p, q)"), &caps()).unwrap();
        assert!(!report.flat);
        assert!(report.single_theta.is_none());
    }

    #[test]
    fn flat_characterization_rejects_inconsistent_input() {
        assert!(matches!(
            flat_characterization(&f("p /\\ ~p"), &caps()),
            Err(Error::InconsistentInput)
        ));
    }
}
