//! Seeded random sampling of formulas, teams and flat substitutions, used by
//! the experiment harness and the property suites.
//!
//! Sampling is fragment-aware: every produced formula passes the syntactic
//! fragment check, and `xpd` dependence atoms only receive shape-flat
//! arguments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{Formula, Fragment};
use crate::substitution::Substitution;
use crate::team::{Scope, Team};

/// Sampling parameters: the fragment, the variable pool, and the connective
/// depth below which only leaves are drawn.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub fragment: Fragment,
    pub vars: Vec<String>,
    pub max_depth: usize,
}

impl SamplerConfig {
    pub fn new(fragment: Fragment, vars: &[&str], max_depth: usize) -> SamplerConfig {
        SamplerConfig {
            fragment,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            max_depth,
        }
    }
}

fn random_var<R: Rng>(rng: &mut R, cfg: &SamplerConfig) -> Formula {
    Formula::var(cfg.vars.choose(rng).expect("nonempty variable pool").clone())
}

fn random_literal<R: Rng>(rng: &mut R, cfg: &SamplerConfig) -> Formula {
    let var = random_var(rng, cfg);
    if rng.gen_bool(0.5) {
        var
    } else {
        Formula::neg(var)
    }
}

fn random_var_dep<R: Rng>(rng: &mut R, cfg: &SamplerConfig) -> Formula {
    let arity = rng.gen_range(0..=2.min(cfg.vars.len() - 1));
    let mut pool = cfg.vars.clone();
    pool.shuffle(rng);
    let args = pool[..arity].iter().map(Formula::var).collect();
    Formula::dep(args, Formula::var(&pool[arity]))
}

fn random_leaf<R: Rng>(rng: &mut R, cfg: &SamplerConfig) -> Formula {
    match cfg.fragment {
        Fragment::InqL => match rng.gen_range(0..10) {
            0 => Formula::Bot,
            1 => Formula::Top,
            _ => random_var(rng, cfg),
        },
        Fragment::Pd | Fragment::Pt => match rng.gen_range(0..10) {
            0 => Formula::Bot,
            1 => Formula::Top,
            2 | 3 => random_var_dep(rng, cfg),
            _ => random_literal(rng, cfg),
        },
        Fragment::Xpd | Fragment::Xpt => match rng.gen_range(0..10) {
            0 => Formula::Bot,
            1 => Formula::Top,
            2 => random_var_dep(rng, cfg),
            _ => random_literal(rng, cfg),
        },
    }
}

/// Draws a random formula in the configured fragment.
pub fn random_formula<R: Rng>(rng: &mut R, cfg: &SamplerConfig) -> Formula {
    random_formula_at(rng, cfg, cfg.max_depth)
}

fn random_formula_at<R: Rng>(rng: &mut R, cfg: &SamplerConfig, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_leaf(rng, cfg);
    }
    match cfg.fragment {
        Fragment::Pd => {
            let (l, r) = two_below(rng, cfg, depth);
            if rng.gen_bool(0.5) {
                Formula::and(l, r)
            } else {
                Formula::tensor(l, r)
            }
        }
        Fragment::InqL => match rng.gen_range(0..7) {
            0 => Formula::neg(random_formula_at(rng, cfg, depth - 1)),
            1 | 2 => pair(rng, cfg, depth, Formula::and),
            3 | 4 => pair(rng, cfg, depth, Formula::or),
            _ => pair(rng, cfg, depth, Formula::imp),
        },
        Fragment::Pt => match rng.gen_range(0..8) {
            0 | 1 => pair(rng, cfg, depth, Formula::and),
            2 | 3 => pair(rng, cfg, depth, Formula::tensor),
            4 | 5 => pair(rng, cfg, depth, Formula::or),
            _ => pair(rng, cfg, depth, Formula::imp),
        },
        Fragment::Xpd => match rng.gen_range(0..7) {
            0 => Formula::neg(random_formula_at(rng, cfg, depth - 1)),
            1 => random_flat_dep(rng, cfg, depth),
            2 | 3 => pair(rng, cfg, depth, Formula::and),
            _ => pair(rng, cfg, depth, Formula::tensor),
        },
        Fragment::Xpt => match rng.gen_range(0..10) {
            0 => Formula::neg(random_formula_at(rng, cfg, depth - 1)),
            1 => random_general_dep(rng, cfg, depth),
            2 | 3 => pair(rng, cfg, depth, Formula::and),
            4 | 5 => pair(rng, cfg, depth, Formula::tensor),
            6 | 7 => pair(rng, cfg, depth, Formula::or),
            _ => pair(rng, cfg, depth, Formula::imp),
        },
    }
}

fn two_below<R: Rng>(rng: &mut R, cfg: &SamplerConfig, depth: usize) -> (Formula, Formula) {
    (
        random_formula_at(rng, cfg, depth - 1),
        random_formula_at(rng, cfg, depth - 1),
    )
}

fn pair<R: Rng>(
    rng: &mut R,
    cfg: &SamplerConfig,
    depth: usize,
    node: fn(Formula, Formula) -> Formula,
) -> Formula {
    let (l, r) = two_below(rng, cfg, depth);
    node(l, r)
}

fn random_flat_dep<R: Rng>(rng: &mut R, cfg: &SamplerConfig, depth: usize) -> Formula {
    let arity = rng.gen_range(0..=2);
    let args = (0..arity).map(|_| random_flat_at(rng, cfg, depth - 1)).collect();
    Formula::dep(args, random_flat_at(rng, cfg, depth - 1))
}

fn random_general_dep<R: Rng>(rng: &mut R, cfg: &SamplerConfig, depth: usize) -> Formula {
    let arity = rng.gen_range(0..=2);
    // Keep the argument subtrees shallow; they already multiply the cost of
    // every evaluation.
    let arg_depth = (depth - 1).min(1);
    let args = (0..arity).map(|_| random_formula_at(rng, cfg, arg_depth)).collect();
    Formula::dep(args, random_formula_at(rng, cfg, arg_depth))
}

/// Draws a shape-flat formula in the configured fragment: literals and
/// constants combined with the fragment's flat-preserving connectives.
pub fn random_flat_formula<R: Rng>(rng: &mut R, cfg: &SamplerConfig) -> Formula {
    random_flat_at(rng, cfg, cfg.max_depth)
}

fn random_flat_at<R: Rng>(rng: &mut R, cfg: &SamplerConfig, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..8) {
            0 => Formula::Bot,
            1 => Formula::Top,
            _ => random_literal(rng, cfg),
        };
    }
    let negate_whole = matches!(cfg.fragment, Fragment::InqL | Fragment::Xpd | Fragment::Xpt);
    match (cfg.fragment.has_tensor(), cfg.fragment.has_implication(), rng.gen_range(0..6)) {
        (_, _, 0) if negate_whole => Formula::neg(random_flat_at(rng, cfg, depth - 1)),
        (true, _, 1 | 2) => {
            let (l, r) = flat_two_below(rng, cfg, depth);
            Formula::tensor(l, r)
        }
        (_, true, 3) => {
            let (l, r) = flat_two_below(rng, cfg, depth);
            Formula::imp(l, r)
        }
        _ => {
            let (l, r) = flat_two_below(rng, cfg, depth);
            Formula::and(l, r)
        }
    }
}

fn flat_two_below<R: Rng>(rng: &mut R, cfg: &SamplerConfig, depth: usize) -> (Formula, Formula) {
    (
        random_flat_at(rng, cfg, depth - 1),
        random_flat_at(rng, cfg, depth - 1),
    )
}

/// Draws a uniformly random team on the scope.
pub fn random_team<R: Rng>(rng: &mut R, scope: &Scope) -> Team {
    let codes: Vec<u64> =
        (0..scope.valuation_count() as u64).filter(|_| rng.gen_bool(0.5)).collect();
    Team::from_codes(scope.clone(), codes).expect("codes within range")
}

/// Draws a flat substitution: each domain variable maps to a random
/// shape-flat formula over the image pool (or stays fixed).
pub fn random_flat_substitution<R: Rng>(
    rng: &mut R,
    cfg: &SamplerConfig,
    domain: &[String],
) -> Substitution {
    let mut subst = Substitution::identity();
    for var in domain {
        if rng.gen_bool(0.8) {
            subst.insert(var.clone(), random_flat_at(rng, cfg, cfg.max_depth.min(2)));
        }
    }
    subst
}
