//! Admissible-rule checking over flat substitutions.
//!
//! A rule `premise / conclusion` is admissible (for flat substitutions) when
//! every flat substitution validating the premise also validates the
//! conclusion. For these logics admissibility coincides with derivability,
//! and the proof is constructive: if the rule is not derivable, some maximal
//! component of the premise's normal form fails to entail the conclusion, and
//! the Prucnal unifier of that component's theta is a flat witness — it
//! validates the premise but not the conclusion. [`counterexample_substitution`]
//! implements exactly that extraction; [`structural_completeness_experiment`]
//! stress-tests the equivalence on random rules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::formula::{Formula, Fragment};
use crate::generate::{random_formula, SamplerConfig};
use crate::normalform::{normal_form, theta};
use crate::projectivity::projective_unifier;
use crate::semantics::{consequence, is_valid, Caps};
use crate::substitution::{is_flat_substitution, Substitution};
use crate::team::{Scope, Team};

/// Whether the conclusion follows from the premise over all teams.
pub fn derivable(premise: &Formula, conclusion: &Formula, caps: &Caps) -> Result<bool> {
    consequence(std::slice::from_ref(premise), conclusion, caps)
}

fn verify_witness(
    witness: &Substitution,
    premise: &Formula,
    conclusion: &Formula,
    caps: &Caps,
) -> Result<()> {
    if !is_flat_substitution(witness, caps)? {
        return Err(Error::InternalAssertion(format!(
            "witness for `{premise}` / `{conclusion}` is not flat"
        )));
    }
    if !is_valid(&witness.apply(premise), caps)? {
        return Err(Error::InternalAssertion(format!(
            "witness does not validate the premise `{premise}`"
        )));
    }
    if is_valid(&witness.apply(conclusion), caps)? {
        return Err(Error::InternalAssertion(format!(
            "witness validates the conclusion `{conclusion}`"
        )));
    }
    Ok(())
}

/// For a non-derivable rule, constructs a flat substitution that validates
/// the premise but not the conclusion; `None` exactly when the rule is
/// derivable.
///
/// The construction walks the premise's normal-form components in canonical
/// order, picks the first whose theta does not entail the conclusion, and
/// returns the projective unifier of that theta. The returned witness is
/// re-verified before being handed out.
pub fn counterexample_substitution(
    premise: &Formula,
    conclusion: &Formula,
    fragment: Fragment,
    caps: &Caps,
) -> Result<Option<Substitution>> {
    if derivable(premise, conclusion, caps)? {
        return Ok(None);
    }
    let nf = normal_form(premise, fragment, caps)?;
    for component in &nf.components {
        let component_theta = theta(component, fragment);
        if consequence(std::slice::from_ref(&component_theta), conclusion, caps)? {
            continue;
        }
        let unifier = projective_unifier(&component_theta, fragment, caps)?.ok_or_else(|| {
            Error::InternalAssertion(format!(
                "theta `{component_theta}` of a nonempty team has no projective unifier"
            ))
        })?;
        verify_witness(&unifier, premise, conclusion, caps)?;
        return Ok(Some(unifier));
    }
    Err(Error::InternalAssertion(format!(
        "`{premise}` does not entail `{conclusion}` but every normal-form component does"
    )))
}

/// Bounded refutation search: enumerates flat substitutions whose images are,
/// up to equivalence, all flat formulas over the bound scope — `bot` first,
/// then the thetas of the nonempty teams in ascending bitset order — and
/// returns the first one validating the premise but not the conclusion.
///
/// Complete only for images over the bound scope; the constructive route in
/// [`counterexample_substitution`] is the full decision procedure.
pub fn bounded_admissibility_search(
    premise: &Formula,
    conclusion: &Formula,
    fragment: Fragment,
    bound_scope: &Scope,
    budget: usize,
    caps: &Caps,
) -> Result<Option<Substitution>> {
    if bound_scope.len() > caps.family_vars {
        return Err(Error::ScopeCapExceeded {
            what: "bounded admissibility search",
            size: bound_scope.len(),
            cap: caps.family_vars,
            hint: "raise --family-cap or TEAMLOGIC_FAMILY_CAP for this query",
        });
    }
    let rule_scope = Scope::of_formulas([premise, conclusion]);
    let images: Vec<Formula> = (0..(1u64 << bound_scope.valuation_count()))
        .map(|code| {
            let team = Team::from_family_code(bound_scope.clone(), code)?;
            Ok(theta(&team, fragment))
        })
        .collect::<Result<_>>()?;

    let vars = rule_scope.vars();
    let mut odometer = vec![0usize; vars.len()];
    let mut tried = 0usize;
    loop {
        if tried >= budget {
            return Err(Error::BudgetExceeded { budget });
        }
        tried += 1;
        let candidate = Substitution::from_pairs(
            vars.iter()
                .zip(&odometer)
                .map(|(var, &i)| (var.clone(), images[i].clone())),
        );
        if is_valid(&candidate.apply(premise), caps)?
            && !is_valid(&candidate.apply(conclusion), caps)?
        {
            return Ok(Some(candidate));
        }
        // Advance; lower positions cycle fastest so small images are tried
        // first.
        let mut position = 0;
        loop {
            if position == odometer.len() {
                return Ok(None);
            }
            odometer[position] += 1;
            if odometer[position] < images.len() {
                break;
            }
            odometer[position] = 0;
            position += 1;
        }
    }
}

/// The admissibility verdict for one rule.
#[derive(Debug, Clone)]
pub enum AdmissibilityVerdict {
    /// No refuting substitution exists with images over the bound scope. Not
    /// a proof of admissibility beyond that bound.
    AdmissibleWithinBound { bound_vars: usize },
    NotAdmissible { witness: Substitution },
}

/// Combined judgement of one rule: derivability, the constructive
/// counterexample, and the bounded search outcome.
#[derive(Debug, Clone)]
pub struct RuleVerdict {
    pub premise: Formula,
    pub conclusion: Formula,
    pub derivable: bool,
    pub verdict: AdmissibilityVerdict,
    pub counterexample: Option<Substitution>,
}

/// Judges a rule by all three routes and cross-checks them: a derivable rule
/// must produce no counterexample and no bounded witness.
pub fn judge_rule(
    premise: &Formula,
    conclusion: &Formula,
    fragment: Fragment,
    bound_scope: &Scope,
    budget: usize,
    caps: &Caps,
) -> Result<RuleVerdict> {
    let derivable = derivable(premise, conclusion, caps)?;
    let counterexample = counterexample_substitution(premise, conclusion, fragment, caps)?;
    if derivable != counterexample.is_none() {
        return Err(Error::InternalAssertion(format!(
            "derivability and counterexample construction disagree on `{premise}` / `{conclusion}`"
        )));
    }
    let bounded =
        bounded_admissibility_search(premise, conclusion, fragment, bound_scope, budget, caps)?;
    if bounded.is_some() && derivable {
        return Err(Error::InternalAssertion(format!(
            "bounded search refuted the derivable rule `{premise}` / `{conclusion}`"
        )));
    }
    let verdict = match counterexample.clone().or(bounded) {
        Some(witness) => AdmissibilityVerdict::NotAdmissible { witness },
        None => AdmissibilityVerdict::AdmissibleWithinBound { bound_vars: bound_scope.len() },
    };
    Ok(RuleVerdict {
        premise: premise.clone(),
        conclusion: conclusion.clone(),
        derivable,
        verdict,
        counterexample,
    })
}

/// One axiom-schema instance `(~phi -> ~psi_1 || ... || ~psi_k) ->
/// (~phi -> ~psi_1) || ... || (~phi -> ~psi_k)`.
///
/// Inputs must lie in the implication fragment; the instance is a theorem of
/// the inquisitive semantics for every such choice.
pub fn ndk_instance(k: usize, phi: &Formula, psis: &[Formula]) -> Result<Formula> {
    if k == 0 || psis.len() != k {
        return Err(Error::InvalidArgument(format!(
            "schema arity {k} does not match {} disjuncts (need k >= 1)",
            psis.len()
        )));
    }
    for input in std::iter::once(phi).chain(psis) {
        let violations = input.fragment_check(Fragment::InqL);
        if !violations.is_empty() {
            return Err(Error::Fragment { violations });
        }
    }
    let neg_phi = Formula::neg(phi.clone());
    let antecedent = Formula::imp(
        neg_phi.clone(),
        psis.iter()
            .map(|psi| Formula::neg(psi.clone()))
            .reduce(Formula::or)
            .expect("k >= 1"),
    );
    let conclusion = psis
        .iter()
        .map(|psi| Formula::imp(neg_phi.clone(), Formula::neg(psi.clone())))
        .reduce(Formula::or)
        .expect("k >= 1");
    Ok(Formula::imp(antecedent, conclusion))
}

/// Configuration of the structural-completeness experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub fragment: Fragment,
    /// Size of the sampling variable pool; at most 3.
    pub var_count: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// Connective depth of the sampled rules.
    pub max_depth: usize,
    /// Variables of the bound scope handed to the bounded search.
    pub bound_vars: usize,
}

impl ExperimentConfig {
    pub fn new(fragment: Fragment, var_count: usize, sample_count: usize, seed: u64) -> Self {
        ExperimentConfig { fragment, var_count, sample_count, seed, max_depth: 4, bound_vars: 1 }
    }
}

/// A failed cross-check, dumped with everything needed to replay it.
#[derive(Debug, Clone)]
pub struct ExperimentFailure {
    pub sample: usize,
    pub premise: Formula,
    pub conclusion: Formula,
    pub witness: Option<Substitution>,
    pub detail: String,
}

/// Aggregated counts of one experiment run. The experiment passes iff
/// `assertion_failures == 0`.
#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub samples: usize,
    pub derivable: usize,
    pub non_derivable: usize,
    pub witnesses_constructed: usize,
    pub assertion_failures: usize,
    pub failures: Vec<ExperimentFailure>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.assertion_failures == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "samples": self.samples,
            "derivable": self.derivable,
            "non_derivable": self.non_derivable,
            "witnesses_constructed": self.witnesses_constructed,
            "assertion_failures": self.assertion_failures,
            "failures": self.failures.iter().map(|f| json!({
                "sample": f.sample,
                "premise": f.premise.to_string(),
                "conclusion": f.conclusion.to_string(),
                "witness": f.witness.as_ref().map(Substitution::to_json),
                "detail": f.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

const VAR_POOL: [&str; 3] = ["p", "q", "r"];

/// Samples random rules and checks, per rule, that derivability, the
/// constructive counterexample, the witness re-verification and the bounded
/// search all tell one story.
pub fn structural_completeness_experiment(
    config: &ExperimentConfig,
    caps: &Caps,
) -> Result<ExperimentReport> {
    if config.var_count == 0 || config.var_count > VAR_POOL.len() {
        return Err(Error::InvalidArgument(format!(
            "experiment variable pool must have 1 to {} variables, got {}",
            VAR_POOL.len(),
            config.var_count
        )));
    }
    let vars = &VAR_POOL[..config.var_count];
    let sampler = SamplerConfig::new(config.fragment, vars, config.max_depth);
    let bound_scope = Scope::new(vars[..config.bound_vars.clamp(1, vars.len())].to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = ExperimentReport::default();

    for sample in 0..config.sample_count {
        let premise = random_formula(&mut rng, &sampler);
        let conclusion = random_formula(&mut rng, &sampler);
        report.samples += 1;

        let fail =
            |report: &mut ExperimentReport, witness: Option<Substitution>, detail: String| {
                report.assertion_failures += 1;
                report.failures.push(ExperimentFailure {
                    sample,
                    premise: premise.clone(),
                    conclusion: conclusion.clone(),
                    witness,
                    detail,
                });
            };

        let is_derivable = derivable(&premise, &conclusion, caps)?;
        if is_derivable {
            report.derivable += 1;
        } else {
            report.non_derivable += 1;
        }

        match counterexample_substitution(&premise, &conclusion, config.fragment, caps) {
            Ok(Some(witness)) => {
                // The construction re-verifies internally; re-check here so a
                // report failure cannot hide behind an early error path.
                match verify_witness(&witness, &premise, &conclusion, caps) {
                    Ok(()) if !is_derivable => report.witnesses_constructed += 1,
                    Ok(()) => fail(
                        &mut report,
                        Some(witness),
                        "witness constructed for a derivable rule".into(),
                    ),
                    Err(e) => fail(&mut report, Some(witness), e.to_string()),
                }
            }
            Ok(None) => {
                if !is_derivable {
                    fail(
                        &mut report,
                        None,
                        "non-derivable rule produced no counterexample".into(),
                    );
                }
            }
            Err(e) => fail(&mut report, None, e.to_string()),
        }

        match bounded_admissibility_search(
            &premise,
            &conclusion,
            config.fragment,
            &bound_scope,
            1_000_000,
            caps,
        ) {
            Ok(Some(witness)) => {
                if is_derivable {
                    fail(
                        &mut report,
                        Some(witness),
                        "bounded search refuted a derivable rule".into(),
                    );
                }
            }
            Ok(None) => {}
            Err(e) => fail(&mut report, None, e.to_string()),
        }
    }
    Ok(report)
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

    #[test]
    fn derivability_examples() {
        assert!(derivable(&f("p \\/ p"), &f("p"), &caps()).unwrap());
        assert!(!derivable(&f("=(p) \\/ =(p)"), &f("=(p)"), &caps()).unwrap());
        assert!(!derivable(&f("p || ~p"), &f("p"), &caps()).unwrap());
    }

    #[test]
    fn counterexample_for_inquisitive_excluded_middle() {
        let premise = f("p || ~p");
        let conclusion = f("p");
        let witness =
            counterexample_substitution(&premise, &conclusion, Fragment::InqL, &caps())
                .unwrap()
                .unwrap();
        // First failing component is the p=0 team; its theta is ~~~p.
        assert_eq!(witness.image("p"), f("~~~p /\\ p"));
        assert!(is_valid(&witness.apply(&premise), &caps()).unwrap());
        assert!(!is_valid(&witness.apply(&conclusion), &caps()).unwrap());
    }

    #[test]
    fn counterexample_for_the_constancy_rule() {
        let premise = f("=(p) \\/ =(p)");
        let conclusion = f("=(p)");
        let witness =
            counterexample_substitution(&premise, &conclusion, Fragment::Xpd, &caps())
                .unwrap()
                .unwrap();
        // The premise is valid, so its only component is the full team.
        assert!(is_valid(&witness.apply(&premise), &caps()).unwrap());
        assert!(!is_valid(&witness.apply(&conclusion), &caps()).unwrap());
        assert!(is_flat_substitution(&witness, &caps()).unwrap());
    }

    #[test]
    fn derivable_rules_have_no_counterexample() {
        for (premise, conclusion) in [("p", "p"), ("p \\/ p", "p"), ("~~p", "p")] {
            assert!(counterexample_substitution(
                &f(premise),
                &f(conclusion),
                Fragment::Xpd,
                &caps()
            )
            .unwrap()
            .is_none());
        }
    }

    #[test]
    fn bounded_search_finds_the_bot_witness_first() {
        let bound = Scope::new(["q"]).unwrap();
        let witness = bounded_admissibility_search(
            &f("p || ~p"),
            &f("p"),
            Fragment::InqL,
            &bound,
            10_000,
            &caps(),
        )
        .unwrap()
        .unwrap();
        assert_eq!(witness.image("p"), Formula::Bot);
    }

    #[test]
    fn bounded_search_exonerates_derivable_rules() {
        let bound = Scope::new(["q"]).unwrap();
        for (premise, conclusion) in [("p \\/ p", "p"), ("~~p", "p")] {
            assert!(
                bounded_admissibility_search(
                    &f(premise),
                    &f(conclusion),
                    Fragment::Xpd,
                    &bound,
                    10_000,
                    &caps(),
                )
                .unwrap()
                .is_none(),
                "{premise} / {conclusion}"
            );
        }
    }

    #[test]
    fn bounded_search_budget_is_enforced() {
        let bound = Scope::new(["q"]).unwrap();
        assert!(matches!(
            bounded_admissibility_search(&f("~~p"), &f("p"), Fragment::Xpd, &bound, 3, &caps()),
            Err(Error::BudgetExceeded { budget: 3 })
        ));
    }

    #[test]
    fn judge_rule_combines_the_routes() {
        let bound = Scope::new(["q"]).unwrap();
        let verdict =
            judge_rule(&f("p \\/ p"), &f("p"), Fragment::Xpd, &bound, 10_000, &caps()).unwrap();
        assert!(verdict.derivable);
        assert!(verdict.counterexample.is_none());
        assert!(matches!(verdict.verdict, AdmissibilityVerdict::AdmissibleWithinBound { .. }));

        let verdict =
            judge_rule(&f("p || ~p"), &f("p"), Fragment::InqL, &bound, 10_000, &caps()).unwrap();
        assert!(!verdict.derivable);
        assert!(matches!(verdict.verdict, AdmissibilityVerdict::NotAdmissible { .. }));
    }

    #[test]
    fn ndk_instances_are_valid() {
        let identity_like = ndk_instance(1, &f("p"), &[f("q")]).unwrap();
        assert!(is_valid(&identity_like, &caps()).unwrap());
        let two = ndk_instance(2, &f("p"), &[f("q"), f("r")]).unwrap();
        assert_eq!(two, f("(~p -> ~q || ~r) -> (~p -> ~q) || (~p -> ~r)"));
        assert!(is_valid(&two, &caps()).unwrap());
    }

    #[test]
    fn ndk_rejects_bad_arity_and_foreign_connectives() {
        assert!(matches!(
            ndk_instance(2, &f("p"), &[f("q")]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            ndk_instance(1, &f("p \\/ q"), &[f("q")]),
            Err(Error::Fragment { .. })
        ));
    }

    #[test]
    fn small_experiment_passes() {
        let config = ExperimentConfig {
            max_depth: 3,
            ..ExperimentConfig::new(Fragment::InqL, 2, 40, 1)
        };
        let report = structural_completeness_experiment(&config, &caps()).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
        assert_eq!(report.samples, 40);
        assert_eq!(report.derivable + report.non_derivable, 40);
        assert_eq!(report.witnesses_constructed, report.non_derivable);
    }
}
