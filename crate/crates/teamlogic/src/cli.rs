//! Command-line front end: one subcommand per library operation, with text or
//! single-document JSON output.
//!
//! Exit codes: 0 computed, 1 usage or input error, 2 cap exceeded, 3 internal
//! assertion failure (including a failing experiment).

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::admissibility::{
    counterexample_substitution, judge_rule, structural_completeness_experiment,
    AdmissibilityVerdict, ExperimentConfig,
};
use crate::error::{Error, Result};
use crate::formula::{Formula, Fragment};
use crate::normalform::{flat_characterization, normal_form};
use crate::parser::parse;
use crate::projectivity::projective_unifier;
use crate::semantics::{
    consequence, evaluate, fragment_check_semantic, is_valid, singleton_support, Caps,
};
use crate::substitution::{apply_in_fragment, translate_team, Substitution};
use crate::team::{Scope, Team};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "teamlogic", version, about = "Team-semantics decision procedures")]
struct Cli {
    /// Language fragment governing well-formedness checks and renderings.
    #[arg(long, global = true, default_value = "xpt")]
    fragment: Fragment,

    /// Variable cap for per-team evaluation.
    #[arg(long, global = true, env = "TEAMLOGIC_EVAL_CAP", default_value_t = 16)]
    eval_cap: usize,

    /// Variable cap for team-family enumeration (consequence, normal forms).
    #[arg(long, global = true, env = "TEAMLOGIC_FAMILY_CAP", default_value_t = 4)]
    family_cap: usize,

    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a team literal like '{10, 01}' against a formula.
    Check {
        team: String,
        formula: String,
        /// Comma-separated team scope; defaults to the formula's variables.
        #[arg(long)]
        scope: Option<String>,
    },
    /// Decide validity.
    Valid { formula: String },
    /// Decide consequence: premises, a literal ':', then the conclusion.
    Entails {
        #[arg(required = true)]
        args: Vec<String>,
    },
    /// Compute the canonical normal form.
    Nf { formula: String },
    /// Report the four-way flatness characterization.
    Flat { formula: String },
    /// Construct a projective unifier, if the formula has one.
    Unify { formula: String },
    /// Apply a substitution from a JSON file; optionally translate a team.
    Subst {
        #[arg(long = "subst")]
        subst: PathBuf,
        formula: String,
        /// Team literal to translate alongside the application.
        #[arg(long)]
        team: Option<String>,
        /// Comma-separated scope of the given team.
        #[arg(long)]
        scope: Option<String>,
    },
    /// Derive the rule or construct a flat counterexample substitution.
    Counterexample { premise: String, conclusion: String },
    /// Judge admissibility: constructive route plus bounded search.
    Admissible {
        premise: String,
        conclusion: String,
        /// Number of variables in the bounded-search image scope.
        #[arg(long, default_value_t = 1)]
        bound: usize,
        /// Candidate budget of the bounded search.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Run the structural-completeness experiment.
    Experiment {
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        bound: usize,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ScopeCapExceeded { .. }
        | Error::ScanTooLarge { .. }
        | Error::BudgetExceeded { .. } => 2,
        Error::InternalAssertion(_) => 3,
        _ => 1,
    }
}

/// Entry point over explicit arguments; returns the process exit code.
pub fn run_from<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let caps = Caps { eval_vars: cli.eval_cap, family_vars: cli.family_cap };
    match dispatch(&cli, &caps) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Entry point over `std::env::args`.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

fn parse_checked(text: &str, fragment: Fragment, caps: &Caps) -> Result<Formula> {
    let formula = parse(text, None)?;
    let violations = fragment_check_semantic(&formula, fragment, caps)?;
    if !violations.is_empty() {
        return Err(Error::Fragment { violations });
    }
    Ok(formula)
}

fn parse_scope(spec: &str) -> Result<Scope> {
    Scope::new(spec.split(',').map(str::trim).filter(|s| !s.is_empty()))
}

fn emit(mode: OutputMode, value: &Value, text: impl FnOnce()) {
    match mode {
        OutputMode::Json => println!("{value}"),
        OutputMode::Text => text(),
    }
}

fn dispatch(cli: &Cli, caps: &Caps) -> Result<i32> {
    let fragment = cli.fragment;
    let mode = cli.output;
    match &cli.command {
        Command::Check { team, formula, scope } => {
            let formula = parse_checked(formula, fragment, caps)?;
            let scope = match scope {
                Some(spec) => parse_scope(spec)?,
                None => Scope::of_formula(&formula),
            };
            let team = Team::parse_literal(scope, team)?;
            let verdict = evaluate(&team, &formula, caps)?;
            let value = json!({
                "satisfies": verdict,
                "team": team.to_json(),
                "formula": formula.to_string(),
            });
            emit(mode, &value, || println!("satisfies: {verdict}"));
            Ok(0)
        }
        Command::Valid { formula } => {
            let formula = parse_checked(formula, fragment, caps)?;
            let verdict = is_valid(&formula, caps)?;
            let value = json!({ "valid": verdict, "formula": formula.to_string() });
            emit(mode, &value, || println!("valid: {verdict}"));
            Ok(0)
        }
        Command::Entails { args } => {
            let split = args.iter().position(|a| a == ":").ok_or_else(|| {
                Error::InvalidArgument("expected `entails <premises...> : <conclusion>`".into())
            })?;
            if split + 2 != args.len() {
                return Err(Error::InvalidArgument(
                    "expected exactly one conclusion after `:`".into(),
                ));
            }
            let premises: Vec<Formula> = args[..split]
                .iter()
                .map(|text| parse_checked(text, fragment, caps))
                .collect::<Result<_>>()?;
            let conclusion = parse_checked(&args[split + 1], fragment, caps)?;
            let verdict = consequence(&premises, &conclusion, caps)?;
            let value = json!({
                "entails": verdict,
                "premises": premises.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "conclusion": conclusion.to_string(),
            });
            emit(mode, &value, || println!("entails: {verdict}"));
            Ok(0)
        }
        Command::Nf { formula } => {
            let formula = parse_checked(formula, fragment, caps)?;
            let nf = normal_form(&formula, fragment, caps)?;
            let components: Vec<String> = nf.components.iter().map(Team::to_literal).collect();
            let rendered = nf.formula.as_ref().map(ToString::to_string);
            let value = json!({
                "components": components,
                "formula": rendered,
                "fragment": fragment.to_string(),
            });
            emit(mode, &value, || {
                println!("scope: {}", nf.scope);
                println!("components: {}", components.join(" "));
                match &rendered {
                    Some(text) => println!("formula: {text}"),
                    None => println!("formula: (component list only in this fragment)"),
                }
            });
            Ok(0)
        }
        Command::Flat { formula } => {
            let formula = parse_checked(formula, fragment, caps)?;
            let report = flat_characterization(&formula, caps)?;
            let value = json!({
                "flat": report.flat,
                "single_theta": report.single_theta.as_ref().map(Team::to_literal),
                "double_neg_equiv": report.double_neg_equiv,
                "tensor_excluded_middle": report.tensor_excluded_middle,
            });
            emit(mode, &value, || {
                println!("flat: {}", report.flat);
                match &report.single_theta {
                    Some(team) => println!("single_theta: {}", team.to_literal()),
                    None => println!("single_theta: none"),
                }
                println!("double_neg_equiv: {}", report.double_neg_equiv);
                println!("tensor_excluded_middle: {}", report.tensor_excluded_middle);
            });
            Ok(0)
        }
        Command::Unify { formula } => {
            let formula = parse_checked(formula, fragment, caps)?;
            let unifier = projective_unifier(&formula, fragment, caps)?;
            let witness = match &unifier {
                Some(_) => {
                    let scope = Scope::of_formula(&formula);
                    let support = singleton_support(&formula, &scope, caps)?;
                    support.members().into_iter().next().map(|v| v.bits())
                }
                None => None,
            };
            let value = json!({
                "unifier": unifier.as_ref().map(Substitution::to_json),
                "projective": unifier.is_some(),
                "witness": witness,
            });
            emit(mode, &value, || match &unifier {
                Some(subst) => {
                    println!("projective: true");
                    println!("witness: {}", witness.as_deref().unwrap_or("-"));
                    for var in subst.domain() {
                        println!("{var} -> {}", subst.image(var));
                    }
                }
                None => println!("projective: false (formula is not flat)"),
            });
            Ok(0)
        }
        Command::Subst { subst, formula, team, scope } => {
            let raw = std::fs::read_to_string(subst).map_err(|e| {
                Error::InvalidArgument(format!("cannot read {}: {e}", subst.display()))
            })?;
            let parsed: Value = serde_json::from_str(&raw).map_err(|e| {
                Error::InvalidArgument(format!("{} is not JSON: {e}", subst.display()))
            })?;
            let substitution = Substitution::from_json(&parsed)?;
            let formula = parse_checked(formula, fragment, caps)?;
            let applied = apply_in_fragment(&substitution, &formula, fragment, caps)?;
            let mut value = json!({
                "applied": applied.to_string(),
                "substitution": substitution.to_json(),
            });
            let mut translation = None;
            if let Some(team_text) = team {
                let team_scope = match scope {
                    Some(spec) => parse_scope(spec)?,
                    None => Scope::of_formula(&applied),
                };
                let team = Team::parse_literal(team_scope, team_text)?;
                let target = Scope::of_formula(&formula);
                let translated = translate_team(&team, &substitution, &target, caps)?;
                let lhs = evaluate(&team, &applied, caps)?;
                let rhs = evaluate(&translated, &formula, caps)?;
                let object = value.as_object_mut().expect("object literal");
                object.insert("translated".into(), json!(translated.to_literal()));
                object.insert("satisfies_applied".into(), json!(lhs));
                object.insert("translated_satisfies".into(), json!(rhs));
                translation = Some((translated.to_literal(), lhs, rhs));
            }
            emit(mode, &value, || {
                println!("applied: {applied}");
                if let Some((literal, lhs, rhs)) = &translation {
                    println!("translated: {literal}");
                    println!("satisfies_applied: {lhs}");
                    println!("translated_satisfies: {rhs}");
                }
            });
            Ok(0)
        }
        Command::Counterexample { premise, conclusion } => {
            let premise = parse_checked(premise, fragment, caps)?;
            let conclusion = parse_checked(conclusion, fragment, caps)?;
            let witness = counterexample_substitution(&premise, &conclusion, fragment, caps)?;
            let value = json!({
                "derivable": witness.is_none(),
                "counterexample": witness.as_ref().map(Substitution::to_json),
            });
            emit(mode, &value, || match &witness {
                Some(subst) => {
                    println!("derivable: false");
                    println!("counterexample: {}", subst.to_json());
                }
                None => println!("derivable: true"),
            });
            Ok(0)
        }
        Command::Admissible { premise, conclusion, bound, budget } => {
            let premise = parse_checked(premise, fragment, caps)?;
            let conclusion = parse_checked(conclusion, fragment, caps)?;
            let bound_scope = Scope::new((1..=*bound.max(&1)).map(|i| format!("q{i}")))?;
            let verdict = judge_rule(&premise, &conclusion, fragment, &bound_scope, *budget, caps)?;
            let (label, witness) = match &verdict.verdict {
                AdmissibilityVerdict::AdmissibleWithinBound { .. } => {
                    ("admissible-within-bound", None)
                }
                AdmissibilityVerdict::NotAdmissible { witness } => {
                    ("not-admissible", Some(witness.to_json()))
                }
            };
            let value = json!({
                "derivable": verdict.derivable,
                "verdict": label,
                "bound_vars": bound_scope.len(),
                "witness": witness,
                "counterexample": verdict.counterexample.as_ref().map(Substitution::to_json),
            });
            emit(mode, &value, || {
                println!("derivable: {}", verdict.derivable);
                println!("verdict: {label}");
                if let Some(witness) = &witness {
                    println!("witness: {witness}");
                }
            });
            Ok(0)
        }
        Command::Experiment { vars, samples, seed, depth, bound } => {
            let config = ExperimentConfig {
                fragment,
                var_count: *vars,
                sample_count: *samples,
                seed: *seed,
                max_depth: *depth,
                bound_vars: *bound,
            };
            let report = structural_completeness_experiment(&config, caps)?;
            let value = report.to_json();
            emit(mode, &value, || {
                println!("samples: {}", report.samples);
                println!("derivable: {}", report.derivable);
                println!("non_derivable: {}", report.non_derivable);
                println!("witnesses_constructed: {}", report.witnesses_constructed);
                println!("assertion_failures: {}", report.assertion_failures);
            });
            Ok(if report.passed() { 0 } else { 3 })
        }
    }
}
