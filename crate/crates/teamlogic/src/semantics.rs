//! The team-semantics evaluator and the decision operations built on it:
//! satisfaction, validity, consequence, truth families, singleton supports,
//! flatness and consistency.
//!
//! # How evaluation works
//!
//! A query compiles its formulas into an arena of nodes over one scope. For
//! every node the *singleton support* — the set of valuation codes `c` with
//! `{c} |= node` — is computed bottom-up as a bitmask. Nodes that are flat by
//! shape (variables, constants, any negation, and `/\`, `\/`, `->` over flat
//! operands) are then decided on a team `X` by the subset test
//! `X ⊆ support`. Downward closure makes this sound: a flat formula holds on
//! a team exactly when it holds on each member singleton.
//!
//! Non-flat `->` and `\/` nodes fall back to a scan over subteams of `X`,
//! memoized per (node, team) for the lifetime of the query. For `\/` it
//! suffices to scan disjoint splits `(Y, X \ Y)`: if any cover `X = Y ∪ Z`
//! works then so does the split with `Z' = X \ Y ⊆ Z`, again by downward
//! closure. Dependence atoms whose arguments are flat by shape are decided by
//! grouping members into argument-pattern classes and checking that the
//! consequent is constant on each class; atoms with other arguments are
//! expanded into their defining implication form.

use std::collections::HashMap;

use crate::error::{Error, Result, Violation, ViolationKind};
use crate::formula::{Formula, Fragment};
use crate::team::{Scope, Team, TeamFamily};

/// Scope caps for the two cost regimes: per-team evaluation allocates `2^n`
/// bits, while family-level operations (consequence, truth families,
/// equivalence) enumerate all `2^(2^n)` teams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub eval_vars: usize,
    pub family_vars: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { eval_vars: 16, family_vars: 4 }
    }
}

/// Largest team (member count) for which a non-flat `->` or `\/` node will
/// enumerate subteams.
pub const SUBTEAM_SCAN_LIMIT: usize = 20;

/// Family-level operations index teams by a single 64-bit word, so they
/// support at most 6 variables regardless of the configured cap.
pub const FAMILY_SCOPE_LIMIT: usize = 6;

fn check_family_scope(what: &'static str, scope: &Scope, caps: &Caps) -> Result<()> {
    if scope.len() > FAMILY_SCOPE_LIMIT {
        return Err(Error::ScopeCapExceeded {
            what,
            size: scope.len(),
            cap: FAMILY_SCOPE_LIMIT,
            hint: "team families are indexed by 64-bit words; this limit cannot be raised",
        });
    }
    if scope.len() > caps.family_vars {
        return Err(Error::ScopeCapExceeded {
            what,
            size: scope.len(),
            cap: caps.family_vars,
            hint: "raise --family-cap or TEAMLOGIC_FAMILY_CAP for this query",
        });
    }
    Ok(())
}

fn check_eval_scope(scope: &Scope, caps: &Caps) -> Result<()> {
    if scope.len() > caps.eval_vars {
        return Err(Error::ScopeCapExceeded {
            what: "evaluation",
            size: scope.len(),
            cap: caps.eval_vars,
            hint: "raise --eval-cap or TEAMLOGIC_EVAL_CAP for this query",
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Compiled evaluator

type Words = Vec<u64>;

enum NodeKind {
    /// Decided by `team ⊆ support`.
    Mask,
    Or(usize, usize),
    And(usize, usize),
    Tensor(usize, usize),
    Imp(usize, usize),
    /// Dependence atom with shape-flat arguments: members are grouped by
    /// their argument pattern and the consequent must be constant per group.
    DepClasses { args: Vec<usize>, csq: usize },
    /// Dependence atom with a non-flat argument, delegated to its compiled
    /// defining implication.
    Defer(usize),
}

struct Node {
    kind: NodeKind,
    support: Words,
    flat: bool,
}

pub(crate) struct Evaluator {
    scope: Scope,
    words_len: usize,
    valuations: usize,
    nodes: Vec<Node>,
    roots: Vec<usize>,
    memo: Vec<Option<HashMap<Words, bool>>>,
}

impl Evaluator {
    pub(crate) fn new(scope: Scope, roots: &[&Formula], caps: &Caps) -> Result<Evaluator> {
        check_eval_scope(&scope, caps)?;
        let valuations = scope.valuation_count();
        let words_len = valuations.div_ceil(64);
        let mut ev = Evaluator {
            scope,
            words_len,
            valuations,
            nodes: Vec::new(),
            roots: Vec::new(),
            memo: Vec::new(),
        };
        for root in roots {
            let id = ev.compile(root)?;
            ev.roots.push(id);
        }
        ev.memo = (0..ev.nodes.len()).map(|_| None).collect();
        Ok(ev)
    }

    fn zero_words(&self) -> Words {
        vec![0; self.words_len]
    }

    fn full_words(&self) -> Words {
        let mut words = self.zero_words();
        for (w, word) in words.iter_mut().enumerate() {
            let bits_here = (self.valuations - w * 64).min(64);
            *word = if bits_here == 64 { u64::MAX } else { (1u64 << bits_here) - 1 };
        }
        words
    }

    fn complement(&self, words: &[u64]) -> Words {
        let full = self.full_words();
        words.iter().zip(full).map(|(w, f)| !w & f).collect()
    }

    fn var_mask(&self, index: usize) -> Words {
        let mut words = self.zero_words();
        for code in 0..self.valuations {
            if code >> index & 1 == 1 {
                words[code / 64] |= 1u64 << (code % 64);
            }
        }
        words
    }

    fn push(&mut self, kind: NodeKind, support: Words, flat: bool) -> usize {
        self.nodes.push(Node { kind, support, flat });
        self.nodes.len() - 1
    }

    fn push_neg_of(&mut self, child: usize) -> usize {
        let support = self.complement(&self.nodes[child].support);
        self.push(NodeKind::Mask, support, true)
    }

    fn push_excluded_middle(&mut self, child: usize) -> usize {
        // child ∨ (child -> bot); its singleton support is everything.
        let neg = self.push_neg_of(child);
        let support = self.full_words();
        self.push(NodeKind::Or(child, neg), support, false)
    }

    fn compile(&mut self, f: &Formula) -> Result<usize> {
        match f {
            Formula::Var(name) => {
                let index = self.scope.index_of(name).ok_or_else(|| {
                    Error::ScopeMismatch(format!(
                        "variable `{name}` not in scope `{}`",
                        self.scope
                    ))
                })?;
                let mask = self.var_mask(index);
                Ok(self.push(NodeKind::Mask, mask, true))
            }
            Formula::Bot => {
                let mask = self.zero_words();
                Ok(self.push(NodeKind::Mask, mask, true))
            }
            Formula::Top => {
                let mask = self.full_words();
                Ok(self.push(NodeKind::Mask, mask, true))
            }
            Formula::Neg(c) => {
                let child = self.compile(c)?;
                Ok(self.push_neg_of(child))
            }
            Formula::And(l, r) => {
                let (l, r) = (self.compile(l)?, self.compile(r)?);
                let support: Words = self.nodes[l]
                    .support
                    .iter()
                    .zip(&self.nodes[r].support)
                    .map(|(a, b)| a & b)
                    .collect();
                let flat = self.nodes[l].flat && self.nodes[r].flat;
                let kind = if flat { NodeKind::Mask } else { NodeKind::And(l, r) };
                Ok(self.push(kind, support, flat))
            }
            Formula::Tensor(l, r) => {
                let (l, r) = (self.compile(l)?, self.compile(r)?);
                let support: Words = self.nodes[l]
                    .support
                    .iter()
                    .zip(&self.nodes[r].support)
                    .map(|(a, b)| a | b)
                    .collect();
                let flat = self.nodes[l].flat && self.nodes[r].flat;
                let kind = if flat { NodeKind::Mask } else { NodeKind::Tensor(l, r) };
                Ok(self.push(kind, support, flat))
            }
            Formula::Or(l, r) => {
                let (l, r) = (self.compile(l)?, self.compile(r)?);
                let support: Words = self.nodes[l]
                    .support
                    .iter()
                    .zip(&self.nodes[r].support)
                    .map(|(a, b)| a | b)
                    .collect();
                Ok(self.push(NodeKind::Or(l, r), support, false))
            }
            Formula::Imp(l, r) => {
                let (l, r) = (self.compile(l)?, self.compile(r)?);
                let not_l = self.complement(&self.nodes[l].support);
                let support: Words = not_l
                    .iter()
                    .zip(&self.nodes[r].support)
                    .map(|(a, b)| a | b)
                    .collect();
                let flat = self.nodes[l].flat && self.nodes[r].flat;
                let kind = if flat { NodeKind::Mask } else { NodeKind::Imp(l, r) };
                Ok(self.push(kind, support, flat))
            }
            Formula::Dep(args, csq) => {
                if args.len() >= 64 {
                    return Err(Error::InvalidArgument(
                        "dependence atoms support at most 63 arguments".into(),
                    ));
                }
                let arg_ids: Vec<usize> =
                    args.iter().map(|a| self.compile(a)).collect::<Result<_>>()?;
                let csq_id = self.compile(csq)?;
                let support = self.full_words();
                let all_flat = arg_ids
                    .iter()
                    .chain(std::iter::once(&csq_id))
                    .all(|&id| self.nodes[id].flat);
                if all_flat {
                    return Ok(self.push(
                        NodeKind::DepClasses { args: arg_ids, csq: csq_id },
                        support,
                        false,
                    ));
                }
                // Expand into /\_i (a_i ∨ ¬a_i) -> (c ∨ ¬c) over the already
                // compiled children.
                let mut antecedent: Option<usize> = None;
                for &arg in &arg_ids {
                    let part = self.push_excluded_middle(arg);
                    antecedent = Some(match antecedent {
                        None => part,
                        Some(acc) => {
                            let sup: Words = self.nodes[acc]
                                .support
                                .iter()
                                .zip(&self.nodes[part].support)
                                .map(|(a, b)| a & b)
                                .collect();
                            self.push(NodeKind::And(acc, part), sup, false)
                        }
                    });
                }
                let antecedent = match antecedent {
                    Some(id) => id,
                    None => {
                        let sup = self.full_words();
                        self.push(NodeKind::Mask, sup, true)
                    }
                };
                let consequent = self.push_excluded_middle(csq_id);
                let top = self.push(NodeKind::Imp(antecedent, consequent), support.clone(), false);
                Ok(self.push(NodeKind::Defer(top), support, false))
            }
        }
    }

    pub(crate) fn support_team(&self, root: usize) -> Team {
        Team::from_words(self.scope.clone(), self.nodes[self.roots[root]].support.clone())
    }

    pub(crate) fn eval_root(&mut self, root: usize, team: &Team) -> Result<bool> {
        let id = self.roots[root];
        self.eval(id, team.words())
    }

    fn subset(team: &[u64], mask: &[u64]) -> bool {
        team.iter().zip(mask).all(|(t, m)| t & !m == 0)
    }

    fn member_codes(team: &[u64]) -> Vec<u64> {
        let mut out = Vec::new();
        for (w, &word) in team.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w as u64 * 64 + bits.trailing_zeros() as u64);
                bits &= bits - 1;
            }
        }
        out
    }

    fn eval(&mut self, id: usize, team: &[u64]) -> Result<bool> {
        match &self.nodes[id].kind {
            NodeKind::Mask => Ok(Self::subset(team, &self.nodes[id].support)),
            NodeKind::Or(l, r) => {
                let (l, r) = (*l, *r);
                Ok(self.eval(l, team)? || self.eval(r, team)?)
            }
            NodeKind::And(l, r) => {
                let (l, r) = (*l, *r);
                Ok(self.eval(l, team)? && self.eval(r, team)?)
            }
            NodeKind::Defer(inner) => {
                let inner = *inner;
                self.eval(inner, team)
            }
            NodeKind::DepClasses { args, csq } => {
                let (args, csq) = (args.clone(), *csq);
                let mut class_bits: HashMap<u64, bool> = HashMap::new();
                for code in Self::member_codes(team) {
                    let mut pattern = 0u64;
                    for (i, &arg) in args.iter().enumerate() {
                        if self.nodes[arg].support[(code / 64) as usize] >> (code % 64) & 1 == 1 {
                            pattern |= 1 << i;
                        }
                    }
                    let bit =
                        self.nodes[csq].support[(code / 64) as usize] >> (code % 64) & 1 == 1;
                    match class_bits.insert(pattern, bit) {
                        Some(prev) if prev != bit => return Ok(false),
                        _ => {}
                    }
                }
                Ok(true)
            }
            NodeKind::Tensor(l, r) => {
                let (l, r) = (*l, *r);
                if let Some(&hit) = self.memo[id].as_ref().and_then(|m| m.get(team)) {
                    return Ok(hit);
                }
                let members = Self::member_codes(team);
                if members.len() > SUBTEAM_SCAN_LIMIT {
                    return Err(Error::ScanTooLarge {
                        size: members.len(),
                        limit: SUBTEAM_SCAN_LIMIT,
                    });
                }
                let mut verdict = false;
                // Disjoint splits suffice by downward closure.
                for pick in 0u64..(1u64 << members.len()) {
                    let mut left = vec![0u64; team.len()];
                    let mut right = vec![0u64; team.len()];
                    for (i, &code) in members.iter().enumerate() {
                        let target = if pick >> i & 1 == 1 { &mut left } else { &mut right };
                        target[(code / 64) as usize] |= 1u64 << (code % 64);
                    }
                    if self.eval(l, &left)? && self.eval(r, &right)? {
                        verdict = true;
                        break;
                    }
                }
                self.memo[id]
                    .get_or_insert_with(HashMap::new)
                    .insert(team.to_vec(), verdict);
                Ok(verdict)
            }
            NodeKind::Imp(l, r) => {
                let (l, r) = (*l, *r);
                if let Some(&hit) = self.memo[id].as_ref().and_then(|m| m.get(team)) {
                    return Ok(hit);
                }
                let members = Self::member_codes(team);
                if members.len() > SUBTEAM_SCAN_LIMIT {
                    return Err(Error::ScanTooLarge {
                        size: members.len(),
                        limit: SUBTEAM_SCAN_LIMIT,
                    });
                }
                let mut verdict = true;
                for pick in 0u64..(1u64 << members.len()) {
                    let mut sub = vec![0u64; team.len()];
                    for (i, &code) in members.iter().enumerate() {
                        if pick >> i & 1 == 1 {
                            sub[(code / 64) as usize] |= 1u64 << (code % 64);
                        }
                    }
                    if self.eval(l, &sub)? && !self.eval(r, &sub)? {
                        verdict = false;
                        break;
                    }
                }
                self.memo[id]
                    .get_or_insert_with(HashMap::new)
                    .insert(team.to_vec(), verdict);
                Ok(verdict)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Public operations

/// Whether the team satisfies the formula. The formula's variables must all
/// lie in the team's scope.
pub fn evaluate(team: &Team, f: &Formula, caps: &Caps) -> Result<bool> {
    let needed = Scope::of_formula(f);
    if !team.scope().covers(&needed) {
        return Err(Error::ScopeMismatch(format!(
            "formula over `{needed}` evaluated on a team over `{}`",
            team.scope()
        )));
    }
    let mut ev = Evaluator::new(team.scope().clone(), &[f], caps)?;
    ev.eval_root(0, team)
}

/// Whether the formula holds on every team. By locality and downward closure
/// this reduces to satisfaction on the full team over its own variables.
pub fn is_valid(f: &Formula, caps: &Caps) -> Result<bool> {
    let scope = Scope::of_formula(f);
    let mut ev = Evaluator::new(scope.clone(), &[f], caps)?;
    let full = Team::full(scope);
    ev.eval_root(0, &full)
}

fn team_code_iter(n: usize) -> Box<dyn Iterator<Item = u64>> {
    let valuations = 1usize << n;
    if valuations >= 64 {
        Box::new(0..=u64::MAX)
    } else {
        Box::new(0..(1u64 << valuations))
    }
}

/// Whether every team satisfying all premises also satisfies the conclusion,
/// over the combined scope.
pub fn consequence(premises: &[Formula], conclusion: &Formula, caps: &Caps) -> Result<bool> {
    let scope = Scope::of_formulas(premises.iter().chain(std::iter::once(conclusion)));
    check_family_scope("consequence checking", &scope, caps)?;
    let roots: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    let mut ev = Evaluator::new(scope.clone(), &roots, caps)?;
    for code in team_code_iter(scope.len()) {
        let team = Team::from_family_code(scope.clone(), code)?;
        let mut all_premises = true;
        for i in 0..premises.len() {
            if !ev.eval_root(i, &team)? {
                all_premises = false;
                break;
            }
        }
        if all_premises && !ev.eval_root(premises.len(), &team)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The set of all teams on the scope that satisfy the formula.
pub fn truth_family(f: &Formula, scope: &Scope, caps: &Caps) -> Result<TeamFamily> {
    let needed = Scope::of_formula(f);
    if !scope.covers(&needed) {
        return Err(Error::ScopeMismatch(format!(
            "formula over `{needed}` with family scope `{scope}`"
        )));
    }
    check_family_scope("truth-family enumeration", scope, caps)?;
    let mut ev = Evaluator::new(scope.clone(), &[f], caps)?;
    let mut codes = Vec::new();
    for code in team_code_iter(scope.len()) {
        let team = Team::from_family_code(scope.clone(), code)?;
        if ev.eval_root(0, &team)? {
            codes.push(code);
        }
    }
    let family = TeamFamily::from_sorted_codes(scope.clone(), codes);
    if family.is_empty() || !family.contains_code(0) {
        return Err(Error::InternalAssertion(format!(
            "truth family of `{f}` misses the empty team"
        )));
    }
    if !family.is_downward_closed() {
        return Err(Error::InternalAssertion(format!(
            "truth family of `{f}` is not downward closed"
        )));
    }
    Ok(family)
}

/// Whether the two formulas are satisfied by exactly the same teams over
/// their combined scope.
pub fn equivalent(f: &Formula, g: &Formula, caps: &Caps) -> Result<bool> {
    let scope = Scope::of_formulas([f, g]);
    check_family_scope("equivalence checking", &scope, caps)?;
    let mut ev = Evaluator::new(scope.clone(), &[f, g], caps)?;
    for code in team_code_iter(scope.len()) {
        let team = Team::from_family_code(scope.clone(), code)?;
        if ev.eval_root(0, &team)? != ev.eval_root(1, &team)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The team of valuations whose singletons satisfy the formula.
pub fn singleton_support(f: &Formula, scope: &Scope, caps: &Caps) -> Result<Team> {
    let needed = Scope::of_formula(f);
    if !scope.covers(&needed) {
        return Err(Error::ScopeMismatch(format!(
            "formula over `{needed}` with support scope `{scope}`"
        )));
    }
    let ev = Evaluator::new(scope.clone(), &[f], caps)?;
    Ok(ev.support_team(0))
}

/// Whether the formula is flat: true on a team iff true on every member
/// singleton. It suffices to test the formula on its own singleton support,
/// since downward closure settles every other team from that one verdict.
pub fn is_flat(f: &Formula, caps: &Caps) -> Result<bool> {
    let scope = Scope::of_formula(f);
    let mut ev = Evaluator::new(scope.clone(), &[f], caps)?;
    let support = ev.support_team(0);
    ev.eval_root(0, &support)
}

/// Whether some nonempty team satisfies the formula; by downward closure this
/// is the same as having a nonempty singleton support.
pub fn is_consistent(f: &Formula, caps: &Caps) -> Result<bool> {
    let scope = Scope::of_formula(f);
    let ev = Evaluator::new(scope.clone(), &[f], caps)?;
    Ok(!ev.support_team(0).is_empty())
}

/// Fragment check with the semantic part resolved: dependence-atom arguments
/// that the syntactic check could not classify are tested for flatness here.
pub fn fragment_check_semantic(
    f: &Formula,
    fragment: Fragment,
    caps: &Caps,
) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    for violation in f.fragment_check(fragment) {
        if violation.kind == ViolationKind::RequiresSemanticCheck {
            if !is_flat(&violation.node, caps)? {
                out.push(Violation {
                    kind: ViolationKind::DepArgumentNotFlat,
                    node: violation.node,
                });
            }
        } else {
            out.push(violation);
        }
    }
    Ok(out)
}

/// The defining implication form of a generalized dependence atom:
/// `/\_i (a_i \/ (a_i -> bot)) -> (c \/ (c -> bot))`.
pub fn dep_implication_form(args: &[Formula], consequent: &Formula) -> Formula {
    let excluded_middle =
        |g: &Formula| Formula::or(g.clone(), Formula::imp(g.clone(), Formula::Bot));
    let antecedent = args.iter().map(excluded_middle).reduce(Formula::and);
    let conclusion = excluded_middle(consequent);
    match antecedent {
        Some(ant) => Formula::imp(ant, conclusion),
        None => conclusion,
    }
}

/// Decides a dependence atom by its equivalence-class clause: members of the
/// team are grouped by which arguments their singleton satisfies, and the
/// consequent must not distinguish members of one group. Agrees with the
/// implication clause whenever the arguments and consequent are flat.
pub fn eval_dep_via_classes(
    team: &Team,
    args: &[Formula],
    consequent: &Formula,
    caps: &Caps,
) -> Result<bool> {
    let roots: Vec<&Formula> = args.iter().chain(std::iter::once(consequent)).collect();
    let needed = Scope::of_formulas(roots.iter().copied());
    if !team.scope().covers(&needed) {
        return Err(Error::ScopeMismatch(format!(
            "dependence atom over `{needed}` evaluated on a team over `{}`",
            team.scope()
        )));
    }
    let ev = Evaluator::new(team.scope().clone(), &roots, caps)?;
    let supports: Vec<Team> = (0..roots.len()).map(|i| ev.support_team(i)).collect();
    let (arg_supports, csq_support) = supports.split_at(args.len());
    let mut class_bits: HashMap<u64, bool> = HashMap::new();
    for code in team.member_codes() {
        let mut pattern = 0u64;
        for (i, support) in arg_supports.iter().enumerate() {
            if support.contains_code(code) {
                pattern |= 1 << i;
            }
        }
        let bit = csq_support[0].contains_code(code);
        if let Some(prev) = class_bits.insert(pattern, bit) {
            if prev != bit {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decides a dependence atom through its defining implication form.
pub fn eval_dep_via_implication(
    team: &Team,
    args: &[Formula],
    consequent: &Formula,
    caps: &Caps,
) -> Result<bool> {
    evaluate(team, &dep_implication_form(args, consequent), caps)
}
