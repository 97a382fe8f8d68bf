//! Variable scopes, valuations, bitset teams, and team families.
//!
//! A scope fixes an ordered variable list `p_1, ..., p_n`. A valuation is an
//! `n`-bit code, bit `i` giving the value of `p_{i+1}`. A team is a bitset of
//! length `2^n`, bit `j` set iff the valuation with code `j` is a member.
//! The textual team literal `{10, 01}` over scope `p,q` lists members as
//! bit strings in scope order.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::formula::Formula;

/// An ordered, duplicate-free variable list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scope {
    vars: Vec<String>,
}

impl Scope {
    pub fn new<I, S>(vars: I) -> Result<Scope>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::ScopeMismatch(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Scope { vars })
    }

    /// The combined free variables of the given formulas, in first-occurrence
    /// order across the list.
    pub fn of_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Scope {
        let mut vars: Vec<String> = Vec::new();
        for f in formulas {
            for v in f.free_vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        Scope { vars }
    }

    pub fn of_formula(f: &Formula) -> Scope {
        Scope::of_formulas([f])
    }

    /// Extends this scope with the variables of `other` that it lacks.
    pub fn union(&self, other: &Scope) -> Scope {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        Scope { vars }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.index_of(var).is_some()
    }

    /// Whether every variable of `other` occurs in this scope.
    pub fn covers(&self, other: &Scope) -> bool {
        other.vars.iter().all(|v| self.contains(v))
    }

    /// Number of valuations on this scope, `2^n`.
    pub fn valuation_count(&self) -> usize {
        1usize << self.vars.len()
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vars.join(","))
    }
}

/// A single valuation on a scope, stored as its bit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    scope: Scope,
    code: u64,
}

impl Valuation {
    pub fn new(scope: Scope, code: u64) -> Result<Valuation> {
        if scope.len() < 64 && code >= (1u64 << scope.len()) {
            return Err(Error::ScopeMismatch(format!(
                "valuation code {code} out of range for scope `{scope}`"
            )));
        }
        Ok(Valuation { scope, code })
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn value(&self, var: &str) -> Option<bool> {
        self.scope.index_of(var).map(|i| self.code >> i & 1 == 1)
    }

    /// The member bit string in scope order, e.g. `10` for p=1, q=0.
    pub fn bits(&self) -> String {
        bits_string(self.code, self.scope.len())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

fn bits_string(code: u64, n: usize) -> String {
    (0..n).map(|i| if code >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// A team: a set of valuations on a shared scope, stored as a bitset over
/// valuation codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Team {
    scope: Scope,
    words: Vec<u64>,
}

fn word_count(scope: &Scope) -> usize {
    scope.valuation_count().div_ceil(64)
}

impl Team {
    pub fn empty(scope: Scope) -> Team {
        let words = vec![0; word_count(&scope)];
        Team { scope, words }
    }

    /// The team of all `2^n` valuations.
    pub fn full(scope: Scope) -> Team {
        let mut team = Team::empty(scope);
        let count = team.scope.valuation_count();
        for w in 0..team.words.len() {
            let bits_here = (count - w * 64).min(64);
            team.words[w] = if bits_here == 64 { u64::MAX } else { (1u64 << bits_here) - 1 };
        }
        team
    }

    pub fn singleton(scope: Scope, code: u64) -> Result<Team> {
        let mut team = Team::empty(scope);
        team.try_insert(code)?;
        Ok(team)
    }

    pub fn from_codes(scope: Scope, codes: impl IntoIterator<Item = u64>) -> Result<Team> {
        let mut team = Team::empty(scope);
        for code in codes {
            team.try_insert(code)?;
        }
        Ok(team)
    }

    pub(crate) fn from_words(scope: Scope, words: Vec<u64>) -> Team {
        debug_assert_eq!(words.len(), word_count(&scope));
        Team { scope, words }
    }

    fn try_insert(&mut self, code: u64) -> Result<()> {
        if code as usize >= self.scope.valuation_count() {
            return Err(Error::ScopeMismatch(format!(
                "valuation code {code} out of range for scope `{}`",
                self.scope
            )));
        }
        self.words[(code / 64) as usize] |= 1u64 << (code % 64);
        Ok(())
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains_code(&self, code: u64) -> bool {
        (code as usize) < self.scope.valuation_count()
            && self.words[(code / 64) as usize] >> (code % 64) & 1 == 1
    }

    pub fn member_codes(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len());
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as u64;
                out.push(w as u64 * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn members(&self) -> Vec<Valuation> {
        self.member_codes()
            .into_iter()
            .map(|code| Valuation { scope: self.scope.clone(), code })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset_of(&self, other: &Team) -> bool {
        self.scope == other.scope
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Team) -> Team {
        debug_assert_eq!(self.scope, other.scope);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Team { scope: self.scope.clone(), words }
    }

    pub fn intersection(&self, other: &Team) -> Team {
        debug_assert_eq!(self.scope, other.scope);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Team { scope: self.scope.clone(), words }
    }

    pub fn difference(&self, other: &Team) -> Team {
        debug_assert_eq!(self.scope, other.scope);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        Team { scope: self.scope.clone(), words }
    }

    /// The team bitset as a single word; `None` beyond 6 variables.
    pub fn family_code(&self) -> Option<u64> {
        if self.scope.len() <= 6 {
            Some(self.words[0])
        } else {
            None
        }
    }

    pub fn from_family_code(scope: Scope, code: u64) -> Result<Team> {
        if scope.len() > 6 {
            return Err(Error::ScopeMismatch(format!(
                "scope `{scope}` has more than 6 variables; teams no longer fit one word"
            )));
        }
        let count = scope.valuation_count();
        if count < 64 && code >= (1u64 << count) {
            return Err(Error::ScopeMismatch(format!(
                "team code {code} out of range for scope `{scope}`"
            )));
        }
        Ok(Team { scope, words: vec![code] })
    }

    /// Projects the team onto a sub-scope; members that agree on the kept
    /// variables collapse.
    pub fn restrict_to(&self, target: &Scope) -> Result<Team> {
        let positions: Vec<usize> = target
            .vars()
            .iter()
            .map(|v| {
                self.scope.index_of(v).ok_or_else(|| {
                    Error::ScopeMismatch(format!("variable `{v}` not in scope `{}`", self.scope))
                })
            })
            .collect::<Result<_>>()?;
        let mut out = Team::empty(target.clone());
        for code in self.member_codes() {
            let mut projected = 0u64;
            for (i, &pos) in positions.iter().enumerate() {
                projected |= (code >> pos & 1) << i;
            }
            out.try_insert(projected)?;
        }
        Ok(out)
    }

    /// Lifts the team to a larger scope: the result contains every valuation
    /// whose restriction to this team's scope is a member.
    pub fn cylinder_to(&self, target: &Scope) -> Result<Team> {
        if !target.covers(&self.scope) {
            return Err(Error::ScopeMismatch(format!(
                "scope `{target}` does not extend `{}`",
                self.scope
            )));
        }
        let positions: Vec<usize> = self
            .scope
            .vars()
            .iter()
            .map(|v| target.index_of(v).expect("covered variable"))
            .collect();
        let mut out = Team::empty(target.clone());
        for code in 0..target.valuation_count() as u64 {
            let mut restricted = 0u64;
            for (i, &pos) in positions.iter().enumerate() {
                restricted |= (code >> pos & 1) << i;
            }
            if self.contains_code(restricted) {
                out.try_insert(code)?;
            }
        }
        Ok(out)
    }

    /// Parses a team literal like `{10, 01}` over the given scope.
    pub fn parse_literal(scope: Scope, text: &str) -> Result<Team> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('{')
            .and_then(|rest| rest.strip_suffix('}'))
            .ok_or_else(|| Error::ScopeMismatch(format!("team literal `{text}` must be braced")))?;
        let mut team = Team::empty(scope);
        for entry in inner.split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            team.try_insert(parse_bits(entry, team.scope.len())?)?;
        }
        Ok(team)
    }

    /// Renders the team literal, members in ascending code order.
    pub fn to_literal(&self) -> String {
        let n = self.scope.len();
        let members: Vec<String> =
            self.member_codes().into_iter().map(|c| bits_string(c, n)).collect();
        format!("{{{}}}", members.join(", "))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scope": self.scope.vars(),
            "teams": self.member_codes()
                .into_iter()
                .map(|c| bits_string(c, self.scope.len()))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Team> {
        let bad = |msg: &str| Error::ScopeMismatch(format!("team JSON: {msg}"));
        let scope_vars = value
            .get("scope")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `scope` array"))?
            .iter()
            .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| bad("scope entries must be strings")))
            .collect::<Result<Vec<_>>>()?;
        let scope = Scope::new(scope_vars)?;
        let mut team = Team::empty(scope);
        let entries = value
            .get("teams")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `teams` array"))?;
        for entry in entries {
            let bits = entry.as_str().ok_or_else(|| bad("team entries must be strings"))?;
            team.try_insert(parse_bits(bits, team.scope.len())?)?;
        }
        Ok(team)
    }
}

fn parse_bits(entry: &str, n: usize) -> Result<u64> {
    if entry.len() != n {
        return Err(Error::ScopeMismatch(format!(
            "member `{entry}` has {} bits, scope has {n} variables",
            entry.len()
        )));
    }
    let mut code = 0u64;
    for (i, c) in entry.chars().enumerate() {
        match c {
            '1' => code |= 1 << i,
            '0' => {}
            other => {
                return Err(Error::ScopeMismatch(format!(
                    "member `{entry}` contains `{other}`; expected 0/1"
                )))
            }
        }
    }
    Ok(code)
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

/// A set of teams on a shared scope of at most 6 variables, each team stored
/// as its one-word bitset code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamFamily {
    scope: Scope,
    codes: Vec<u64>,
}

impl TeamFamily {
    pub(crate) fn from_sorted_codes(scope: Scope, codes: Vec<u64>) -> TeamFamily {
        debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
        TeamFamily { scope, codes }
    }

    /// Builds a family from teams on the given scope (at most 6 variables);
    /// duplicates collapse.
    pub fn new(scope: Scope, teams: impl IntoIterator<Item = Team>) -> Result<TeamFamily> {
        let mut codes = Vec::new();
        for team in teams {
            if team.scope() != &scope {
                return Err(Error::ScopeMismatch(format!(
                    "family over `{scope}` given a team over `{}`",
                    team.scope()
                )));
            }
            let code = team.family_code().ok_or_else(|| {
                Error::ScopeMismatch(format!(
                    "scope `{scope}` has more than 6 variables; teams no longer fit one word"
                ))
            })?;
            codes.push(code);
        }
        codes.sort_unstable();
        codes.dedup();
        Ok(TeamFamily { scope, codes })
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    /// Team bitset codes in ascending order.
    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn contains(&self, team: &Team) -> bool {
        team.scope() == &self.scope
            && team.family_code().is_some_and(|c| self.codes.binary_search(&c).is_ok())
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn teams(&self) -> Vec<Team> {
        self.codes
            .iter()
            .map(|&c| Team::from_family_code(self.scope.clone(), c).expect("stored code"))
            .collect()
    }

    /// Every one-member-smaller subteam of a member is a member; with
    /// finiteness this is equivalent to closure under arbitrary subteams.
    pub fn is_downward_closed(&self) -> bool {
        self.codes.iter().all(|&code| {
            let mut bits = code;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                if !self.contains_code(code & !b) {
                    return false;
                }
                bits &= bits - 1;
            }
            true
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope(vars: &[&str]) -> Scope {
        Scope::new(vars.iter().copied()).unwrap()
    }

    #[test]
    fn scope_rejects_duplicates() {
        assert!(Scope::new(["p", "q", "p"]).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let s = scope(&["p", "q"]);
        let team = Team::parse_literal(s.clone(), "{10, 01}").unwrap();
        assert_eq!(team.len(), 2);
        assert!(team.contains_code(0b01)); // p=1, q=0
        assert!(team.contains_code(0b10)); // p=0, q=1
        assert_eq!(team.to_literal(), "{10, 01}");
        assert_eq!(Team::parse_literal(s.clone(), "{}").unwrap(), Team::empty(s));
    }

    #[test]
    fn literal_rejects_wrong_width() {
        let s = scope(&["p", "q"]);
        assert!(Team::parse_literal(s, "{101}").is_err());
    }

    #[test]
    fn full_team_over_empty_scope_is_the_empty_valuation() {
        let team = Team::full(scope(&[]));
        assert_eq!(team.len(), 1);
        assert!(team.contains_code(0));
    }

    #[test]
    fn subset_union_difference() {
        let s = scope(&["p", "q"]);
        let a = Team::from_codes(s.clone(), [0, 1]).unwrap();
        let b = Team::from_codes(s.clone(), [1, 2]).unwrap();
        assert!(!a.is_subset_of(&b));
        assert!(a.intersection(&b).is_subset_of(&a));
        assert_eq!(a.union(&b).len(), 3);
        assert_eq!(a.difference(&b).member_codes(), vec![0]);
    }

    #[test]
    fn restriction_collapses_agreeing_members() {
        let pq = scope(&["p", "q"]);
        let team = Team::from_codes(pq, [0b01, 0b11]).unwrap(); // p=1 in both
        let restricted = team.restrict_to(&scope(&["p"])).unwrap();
        assert_eq!(restricted.member_codes(), vec![1]);
    }

    #[test]
    fn cylinder_inverts_restriction() {
        let p = scope(&["p"]);
        let pq = scope(&["p", "q"]);
        let team = Team::from_codes(p.clone(), [1]).unwrap();
        let lifted = team.cylinder_to(&pq).unwrap();
        assert_eq!(lifted.member_codes(), vec![0b01, 0b11]);
        assert_eq!(lifted.restrict_to(&p).unwrap(), team);
    }

    #[test]
    fn json_round_trip() {
        let s = scope(&["p", "q"]);
        let team = Team::parse_literal(s, "{10, 11}").unwrap();
        let value = team.to_json();
        assert_eq!(Team::from_json(&value).unwrap(), team);
        assert_eq!(
            value.to_string(),
            r#"{"scope":["p","q"],"teams":["10","11"]}"#
        );
    }

    #[test]
    fn downward_closure_check() {
        let s = scope(&["p"]);
        let closed = TeamFamily::from_sorted_codes(s.clone(), vec![0b00, 0b01, 0b10]);
        assert!(closed.is_downward_closed());
        let open = TeamFamily::from_sorted_codes(s, vec![0b00, 0b11]);
        assert!(!open.is_downward_closed());
    }
}
