//! Shared test machinery: a literal set-of-sets reference evaluator (the
//! oracle the bitset evaluator is checked against), an independent
//! truth-table evaluator for classical formulas, and exhaustive formula
//! enumeration.
//!
//! The reference evaluator deliberately mirrors the defining clauses, not the
//! implementation: teams are sets of explicit valuations, tensor disjunction
//! scans all cover pairs (not just disjoint splits), implication scans all
//! subteams, and generalized dependence atoms are pre-expanded into their
//! defining implication form. Only memoization is added so that nested scans
//! stay feasible.

// Each test target uses its own slice of these helpers.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use teamlogic::{Formula, Scope, Team};

pub type NaiveValuation = BTreeMap<String, bool>;
pub type NaiveTeam = BTreeSet<NaiveValuation>;

/// Converts a bitset team into an explicit set of valuations.
pub fn naive_team(team: &Team) -> NaiveTeam {
    let scope = team.scope();
    team.member_codes()
        .into_iter()
        .map(|code| {
            scope
                .vars()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), code >> i & 1 == 1))
                .collect()
        })
        .collect()
}

/// Rewrites dependence atoms with non-variable parts into their defining
/// implication form; variable-only atoms keep their literal pair clause.
fn expand_general_deps(f: &Formula) -> Formula {
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => f.clone(),
        Formula::Neg(c) => Formula::neg(expand_general_deps(c)),
        Formula::Dep(args, csq) => {
            let args: Vec<Formula> = args.iter().map(expand_general_deps).collect();
            let csq = expand_general_deps(csq);
            let all_vars = args
                .iter()
                .chain(std::iter::once(&csq))
                .all(|part| matches!(part, Formula::Var(_)));
            if all_vars {
                Formula::dep(args, csq)
            } else {
                let em = |g: &Formula| {
                    Formula::or(g.clone(), Formula::imp(g.clone(), Formula::Bot))
                };
                let conclusion = em(&csq);
                match args.iter().map(em).reduce(Formula::and) {
                    Some(antecedent) => Formula::imp(antecedent, conclusion),
                    None => conclusion,
                }
            }
        }
        Formula::And(l, r) => Formula::and(expand_general_deps(l), expand_general_deps(r)),
        Formula::Tensor(l, r) => Formula::tensor(expand_general_deps(l), expand_general_deps(r)),
        Formula::Or(l, r) => Formula::or(expand_general_deps(l), expand_general_deps(r)),
        Formula::Imp(l, r) => Formula::imp(expand_general_deps(l), expand_general_deps(r)),
    }
}

pub struct NaiveEvaluator {
    root: Formula,
    ids: HashMap<Formula, usize>,
    memo: HashMap<(usize, NaiveTeam), bool>,
}

impl NaiveEvaluator {
    pub fn new(f: &Formula) -> NaiveEvaluator {
        let root = expand_general_deps(f);
        let mut ids = HashMap::new();
        assign_ids(&root, &mut ids);
        NaiveEvaluator { root, ids, memo: HashMap::new() }
    }

    pub fn satisfies(&mut self, team: &NaiveTeam) -> bool {
        let root = self.root.clone();
        self.eval(&root, team)
    }

    fn eval(&mut self, f: &Formula, team: &NaiveTeam) -> bool {
        let id = self.ids[f];
        if let Some(&hit) = self.memo.get(&(id, team.clone())) {
            return hit;
        }
        let verdict = match f {
            Formula::Var(p) => team.iter().all(|v| v[p]),
            Formula::Bot => team.is_empty(),
            Formula::Top => true,
            // A negation holds when no member singleton satisfies the body.
            Formula::Neg(c) => team
                .iter()
                .all(|v| !self.eval(c, &BTreeSet::from([v.clone()]))),
            // Any two members agreeing on the arguments agree on the
            // consequent (variable arguments only; general atoms were
            // pre-expanded).
            Formula::Dep(args, csq) => {
                let var = |g: &Formula| match g {
                    Formula::Var(name) => name.clone(),
                    _ => unreachable!("general atoms expanded before evaluation"),
                };
                let arg_names: Vec<String> = args.iter().map(var).collect();
                let csq_name = var(csq);
                team.iter().all(|v| {
                    team.iter().all(|w| {
                        arg_names.iter().any(|a| v[a] != w[a]) || v[&csq_name] == w[&csq_name]
                    })
                })
            }
            Formula::And(l, r) => self.eval(l, team) && self.eval(r, team),
            // Some pair of subteams covering the team satisfies the two
            // operands; every cover pair is scanned.
            Formula::Tensor(l, r) => {
                let members: Vec<NaiveValuation> = team.iter().cloned().collect();
                let n = members.len();
                let mut found = false;
                'outer: for ymask in 0u64..(1 << n) {
                    for zmask in 0u64..(1 << n) {
                        if ymask | zmask != (1 << n) - 1 {
                            continue;
                        }
                        let y = pick(&members, ymask);
                        let z = pick(&members, zmask);
                        if self.eval(l, &y) && self.eval(r, &z) {
                            found = true;
                            break 'outer;
                        }
                    }
                }
                found
            }
            Formula::Or(l, r) => self.eval(l, team) || self.eval(r, team),
            // Every subteam satisfying the antecedent satisfies the
            // consequent.
            Formula::Imp(l, r) => {
                let members: Vec<NaiveValuation> = team.iter().cloned().collect();
                let n = members.len();
                let mut holds = true;
                for mask in 0u64..(1 << n) {
                    let sub = pick(&members, mask);
                    if self.eval(l, &sub) && !self.eval(r, &sub) {
                        holds = false;
                        break;
                    }
                }
                holds
            }
        };
        self.memo.insert((id, team.clone()), verdict);
        verdict
    }
}

fn assign_ids(f: &Formula, ids: &mut HashMap<Formula, usize>) {
    if ids.contains_key(f) {
        return;
    }
    let id = ids.len();
    ids.insert(f.clone(), id);
    match f {
        Formula::Var(_) | Formula::Bot | Formula::Top => {}
        Formula::Neg(c) => assign_ids(c, ids),
        Formula::Dep(args, csq) => {
            for a in args {
                assign_ids(a, ids);
            }
            assign_ids(csq, ids);
        }
        Formula::And(l, r) | Formula::Tensor(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
            assign_ids(l, ids);
            assign_ids(r, ids);
        }
    }
}

fn pick(members: &[NaiveValuation], mask: u64) -> NaiveTeam {
    members
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, v)| v.clone())
        .collect()
}

/// Naive satisfaction of a formula by a bitset team.
pub fn naive_satisfies(team: &Team, f: &Formula) -> bool {
    NaiveEvaluator::new(f).satisfies(&naive_team(team))
}

/// Cover-pair tensor check used to validate the disjoint-split shortcut: the
/// team must split into two *disjoint* parts satisfying the operands.
pub fn naive_tensor_disjoint(team: &Team, l: &Formula, r: &Formula) -> bool {
    let members: Vec<NaiveValuation> = naive_team(team).into_iter().collect();
    let n = members.len();
    let mut left_eval = NaiveEvaluator::new(l);
    let mut right_eval = NaiveEvaluator::new(r);
    (0u64..(1 << n)).any(|mask| {
        let y = pick(&members, mask);
        let z = pick(&members, !mask);
        left_eval.satisfies(&y) && right_eval.satisfies(&z)
    })
}

/// Truth-table evaluation of a dependence-atom-free formula, reading both
/// disjunctions classically and implication materially.
pub fn classical_eval(f: &Formula, v: &NaiveValuation) -> bool {
    match f {
        Formula::Var(p) => v[p],
        Formula::Bot => false,
        Formula::Top => true,
        Formula::Neg(c) => !classical_eval(c, v),
        Formula::Dep(..) => panic!("classical evaluation is for classical formulas"),
        Formula::And(l, r) => classical_eval(l, v) && classical_eval(r, v),
        Formula::Tensor(l, r) | Formula::Or(l, r) => {
            classical_eval(l, v) || classical_eval(r, v)
        }
        Formula::Imp(l, r) => !classical_eval(l, v) || classical_eval(r, v),
    }
}

/// All valuations over the scope, as naive maps.
pub fn all_valuations(scope: &Scope) -> Vec<NaiveValuation> {
    (0..scope.valuation_count() as u64)
        .map(|code| {
            scope
                .vars()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), code >> i & 1 == 1))
                .collect()
        })
        .collect()
}

/// Every formula of height at most `depth` built from the leaves with the
/// given unary and binary constructors. Height 1 formulas are the leaves.
pub fn enumerate_formulas(
    leaves: &[Formula],
    unary: &[fn(Formula) -> Formula],
    binary: &[fn(Formula, Formula) -> Formula],
    depth: usize,
) -> Vec<Formula> {
    let mut current: Vec<Formula> = leaves.to_vec();
    for _ in 1..depth {
        let mut next = current.clone();
        for u in unary {
            next.extend(current.iter().map(|f| u(f.clone())));
        }
        for b in binary {
            for l in &current {
                for r in &current {
                    next.push(b(l.clone(), r.clone()));
                }
            }
        }
        current = next;
    }
    current
}
