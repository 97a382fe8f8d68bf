//! Substitutions, their flat/stable classification, homomorphic application,
//! and the induced team translation.
//!
//! A substitution maps finitely many variables to formulas and fixes the
//! rest. Applying a flat substitution commutes with evaluation through the
//! team translation: a team satisfies `σ(f)` exactly when its translated
//! image satisfies `f`, where each member `v` translates to the valuation
//! reading off which images `σ(p)` its singleton satisfies.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::formula::{Formula, Fragment};
use crate::parser::parse;
use crate::semantics::{equivalent, fragment_check_semantic, is_flat, Caps, Evaluator};
use crate::team::{Scope, Team};

/// A finite map from variables to formulas; identity elsewhere.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn identity() -> Substitution {
        Substitution::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Substitution
    where
        I: IntoIterator<Item = (S, Formula)>,
        S: Into<String>,
    {
        Substitution {
            map: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn insert(&mut self, var: impl Into<String>, image: Formula) {
        self.map.insert(var.into(), image);
    }

    /// Explicitly mapped variables, in sorted order.
    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    /// The image of a variable; variables outside the map are fixed.
    pub fn image(&self, var: &str) -> Formula {
        self.map.get(var).cloned().unwrap_or_else(|| Formula::var(var))
    }

    /// Homomorphic application: commutes with every connective and with the
    /// dependence atom, and fixes `bot`/`top`.
    pub fn apply(&self, f: &Formula) -> Formula {
        match f {
            Formula::Var(name) => self.image(name),
            Formula::Bot => Formula::Bot,
            Formula::Top => Formula::Top,
            Formula::Neg(c) => Formula::neg(self.apply(c)),
            Formula::Dep(args, csq) => Formula::dep(
                args.iter().map(|a| self.apply(a)).collect(),
                self.apply(csq),
            ),
            Formula::And(l, r) => Formula::and(self.apply(l), self.apply(r)),
            Formula::Tensor(l, r) => Formula::tensor(self.apply(l), self.apply(r)),
            Formula::Or(l, r) => Formula::or(self.apply(l), self.apply(r)),
            Formula::Imp(l, r) => Formula::imp(self.apply(l), self.apply(r)),
        }
    }

    /// Composition: `(self ∘ other)(p) = self(other(p))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<String, Formula> = other
            .map
            .iter()
            .map(|(k, v)| (k.clone(), self.apply(v)))
            .collect();
        for (k, v) in &self.map {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Substitution { map }
    }

    /// JSON object mapping variables to rendered formulas.
    pub fn to_json(&self) -> Value {
        let mut object = Map::new();
        for (k, v) in &self.map {
            object.insert(k.clone(), Value::String(v.to_string()));
        }
        Value::Object(object)
    }

    pub fn from_json(value: &Value) -> Result<Substitution> {
        let object = value.as_object().ok_or_else(|| {
            Error::InvalidArgument("substitution JSON must be an object".into())
        })?;
        let mut map = BTreeMap::new();
        for (k, v) in object {
            let text = v.as_str().ok_or_else(|| {
                Error::InvalidArgument(format!("substitution image for `{k}` must be a string"))
            })?;
            map.insert(k.clone(), parse(text, None)?);
        }
        Ok(Substitution { map })
    }
}

/// Whether every image in the map is flat. Identity images are variables,
/// hence flat, so only the explicit map matters.
pub fn is_flat_substitution(s: &Substitution, caps: &Caps) -> Result<bool> {
    for var in s.domain() {
        if !is_flat(&s.image(var), caps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every image is stable, i.e. equivalent to its double negation.
/// Stability is classified against the implication fragment: images must be
/// well-formed `inql` formulas. On those, stability and flatness coincide.
pub fn is_stable_substitution(s: &Substitution, caps: &Caps) -> Result<bool> {
    for var in s.domain() {
        let image = s.image(var);
        let violations = image.fragment_check(Fragment::InqL);
        if !violations.is_empty() {
            return Err(Error::Fragment { violations });
        }
        let double_neg = Formula::neg(Formula::neg(image.clone()));
        if !equivalent(&image, &double_neg, caps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Applies the substitution and checks that the result stays inside the
/// fragment (including the semantic flatness condition on `xpd`
/// dependence-atom arguments).
pub fn apply_in_fragment(
    s: &Substitution,
    f: &Formula,
    fragment: Fragment,
    caps: &Caps,
) -> Result<Formula> {
    let applied = s.apply(f);
    let violations = fragment_check_semantic(&applied, fragment, caps)?;
    if !violations.is_empty() {
        return Err(Error::Fragment { violations });
    }
    Ok(applied)
}

/// Computes the supports of the substitution images for each target variable,
/// as bitmask teams over the source scope.
fn image_supports(
    source: &Scope,
    s: &Substitution,
    target: &Scope,
    caps: &Caps,
) -> Result<Vec<Team>> {
    let images: Vec<Formula> = target.vars().iter().map(|v| s.image(v)).collect();
    for image in &images {
        let needed = Scope::of_formula(image);
        if !source.covers(&needed) {
            return Err(Error::ScopeMismatch(format!(
                "substitution image `{image}` over `{needed}` not covered by team scope `{source}`"
            )));
        }
    }
    let roots: Vec<&Formula> = images.iter().collect();
    let ev = Evaluator::new(source.clone(), &roots, caps)?;
    Ok((0..roots.len()).map(|i| ev.support_team(i)).collect())
}

fn translate_code(code: u64, supports: &[Team]) -> u64 {
    let mut translated = 0u64;
    for (i, support) in supports.iter().enumerate() {
        if support.contains_code(code) {
            translated |= 1 << i;
        }
    }
    translated
}

/// The translated team: each member `v` maps to the valuation on the target
/// scope that records, per target variable `p`, whether `{v}` satisfies
/// `σ(p)`.
pub fn translate_team(
    team: &Team,
    s: &Substitution,
    target: &Scope,
    caps: &Caps,
) -> Result<Team> {
    let supports = image_supports(team.scope(), s, target, caps)?;
    Team::from_codes(
        target.clone(),
        team.member_codes().into_iter().map(|c| translate_code(c, &supports)),
    )
}

/// The preimage selection: the members of `source` whose translation lands in
/// `selected`. Requires `selected` to be a subteam of the translated source;
/// the selection then translates back onto `selected` exactly.
pub fn inverse_select(
    selected: &Team,
    source: &Team,
    s: &Substitution,
    caps: &Caps,
) -> Result<Team> {
    let target = selected.scope();
    let supports = image_supports(source.scope(), s, target, caps)?;
    let translated = Team::from_codes(
        target.clone(),
        source.member_codes().into_iter().map(|c| translate_code(c, &supports)),
    )?;
    if !selected.is_subset_of(&translated) {
        return Err(Error::NotSubteam);
    }
    let picked = Team::from_codes(
        source.scope().clone(),
        source
            .member_codes()
            .into_iter()
            .filter(|&c| selected.contains_code(translate_code(c, &supports))),
    )?;
    let back = Team::from_codes(
        target.clone(),
        picked.member_codes().into_iter().map(|c| translate_code(c, &supports)),
    )?;
    if &back != selected {
        return Err(Error::InternalAssertion(
            "inverse selection does not translate back onto the selected team".into(),
        ));
    }
    Ok(picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::semantics::evaluate;

    fn f(s: &str) -> Formula {
        parse(s, None).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    fn scope(vars: &[&str]) -> Scope {
        Scope::new(vars.iter().copied()).unwrap()
    }

    fn subst(pairs: &[(&str, &str)]) -> Substitution {
        Substitution::from_pairs(pairs.iter().map(|&(k, v)| (k, f(v))))
    }

    #[test]
    fn flat_substitution_classification() {
        assert!(is_flat_substitution(&subst(&[("p", "q /\\ r")]), &caps()).unwrap());
        assert!(!is_flat_substitution(&subst(&[("p", "q || ~q")]), &caps()).unwrap());
        assert!(is_flat_substitution(&Substitution::identity(), &caps()).unwrap());
    }

    #[test]
    fn stable_substitution_classification() {
        assert!(is_stable_substitution(&subst(&[("p", "~q")]), &caps()).unwrap());
        assert!(!is_stable_substitution(&subst(&[("p", "q || ~q")]), &caps()).unwrap());
        assert!(is_stable_substitution(&subst(&[("p", "bot")]), &caps()).unwrap());
        // Images outside the implication fragment are not classified.
        assert!(is_stable_substitution(&subst(&[("p", "q \\/ r")]), &caps()).is_err());
    }

    #[test]
    fn apply_is_homomorphic() {
        let s = subst(&[("p", "q /\\ r")]);
        assert_eq!(s.apply(&f("=(p, t)")), f("=(q /\\ r, t)"));
        let s = subst(&[("p", "bot")]);
        assert_eq!(s.apply(&f("p || ~p")), f("bot || ~bot"));
    }

    #[test]
    fn flat_image_under_negation_leaves_pd_for_xpd() {
        let s = subst(&[("p", "q /\\ r")]);
        let applied = s.apply(&f("~p"));
        assert_eq!(applied, f("~(q /\\ r)"));
        assert!(apply_in_fragment(&s, &f("~p"), Fragment::Pd, &caps()).is_err());
        assert!(apply_in_fragment(&s, &f("~p"), Fragment::Xpd, &caps()).is_ok());
    }

    #[test]
    fn nonflat_image_inside_xpd_dep_atom_is_rejected() {
        let s = subst(&[("p", "q || ~q")]);
        assert!(matches!(
            apply_in_fragment(&s, &f("=(p, t)"), Fragment::Xpd, &caps()),
            Err(Error::Fragment { .. })
        ));
        // In xpt the same application is fine.
        assert!(apply_in_fragment(&s, &f("=(p, t)"), Fragment::Xpt, &caps()).is_ok());
    }

    #[test]
    fn translate_bot_image_collapses_to_zero() {
        let s = subst(&[("p", "bot")]);
        let source = Team::from_codes(scope(&["p"]), [0, 1]).unwrap();
        let target = scope(&["p"]);
        let translated = translate_team(&source, &s, &target, &caps()).unwrap();
        assert_eq!(translated.member_codes(), vec![0]);
    }

    #[test]
    fn translate_identity_restricts_scope() {
        let source = Team::from_codes(scope(&["p", "q"]), [0b01, 0b11]).unwrap();
        let target = scope(&["p"]);
        let translated =
            translate_team(&source, &Substitution::identity(), &target, &caps()).unwrap();
        assert_eq!(translated.member_codes(), vec![1]);
    }

    #[test]
    fn translate_negation_flips() {
        let s = subst(&[("p", "~p")]);
        let source = Team::from_codes(scope(&["p"]), [1]).unwrap();
        let translated = translate_team(&source, &s, &scope(&["p"]), &caps()).unwrap();
        assert_eq!(translated.member_codes(), vec![0]);
    }

    #[test]
    fn translation_lemma_on_a_sample() {
        let s = subst(&[("p", "q /\\ r"), ("q", "~r")]);
        let g = f("=(p, q) \\/ p");
        let source_scope = scope(&["q", "r"]);
        let target = scope(&["p", "q"]);
        for code in 0..16u64 {
            let team = Team::from_family_code(source_scope.clone(), code).unwrap();
            let lhs = evaluate(&team, &s.apply(&g), &caps()).unwrap();
            let translated = translate_team(&team, &s, &target, &caps()).unwrap();
            let rhs = evaluate(&translated, &g, &caps()).unwrap();
            assert_eq!(lhs, rhs, "team code {code}");
        }
    }

    #[test]
    fn inverse_select_examples() {
        let s = subst(&[("p", "~p")]);
        let full = Team::full(scope(&["p"]));
        let selected = Team::from_codes(scope(&["p"]), [0]).unwrap();
        let picked = inverse_select(&selected, &full, &s, &caps()).unwrap();
        assert_eq!(picked.member_codes(), vec![1]);

        let empty = Team::empty(scope(&["p"]));
        assert!(inverse_select(&empty, &full, &s, &caps()).unwrap().is_empty());

        // The whole translated team selects the whole source team.
        let translated = translate_team(&full, &s, &scope(&["p"]), &caps()).unwrap();
        let picked = inverse_select(&translated, &full, &s, &caps()).unwrap();
        assert_eq!(picked, full);
    }

    #[test]
    fn inverse_select_requires_a_subteam() {
        let s = subst(&[("p", "bot")]);
        let source = Team::full(scope(&["p"]));
        // The translated team is {0}; {1} is not below it.
        let outside = Team::from_codes(scope(&["p"]), [1]).unwrap();
        assert!(matches!(
            inverse_select(&outside, &source, &s, &caps()),
            Err(Error::NotSubteam)
        ));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let outer = subst(&[("p", "q /\\ r")]);
        let inner = subst(&[("q", "~p"), ("r", "p")]);
        let g = f("=(q, p) \\/ (r /\\ q)");
        assert_eq!(
            outer.apply(&inner.apply(&g)),
            outer.compose(&inner).apply(&g)
        );
    }

    #[test]
    fn json_round_trip() {
        let s = subst(&[("p", "q /\\ r"), ("t", "bot")]);
        let value = s.to_json();
        assert_eq!(Substitution::from_json(&value).unwrap(), s);
        assert_eq!(value.to_string(), r#"{"p":"q /\\ r","t":"bot"}"#);
    }
}
