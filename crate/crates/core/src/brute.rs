//! Brute-force semantic oracle: exhaustive enumeration of interpretations
//! over tiny vocabularies, used to validate the constructive models and the
//! closure algorithms against the model-theoretic definitions.
//!
//! Correctness ballast only; worlds are packed into `u64` masks, which caps
//! the vocabulary at six atoms.

use crate::kb::{DefeasibleConditional, Sckb};
use crate::prop::{Formula, Vocabulary};
use crate::semantics::{EpistemicInterpretation, Rank, RankedInterpretation};
use thiserror::Error;

/// Bounds on exhaustive enumeration. The defaults allow full enumeration
/// over two atoms; three-atom runs should be sampled or one-off.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationBudget {
    pub max_atoms: usize,
    /// Cap on the number of finite layers; `None` means one per world,
    /// beyond which convexity leaves nothing to enumerate.
    pub max_rank_levels: Option<usize>,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_atoms: 2,
            max_rank_levels: None,
        }
    }
}

impl EnumerationBudget {
    pub fn with_atoms(max_atoms: usize) -> Self {
        EnumerationBudget {
            max_atoms,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BruteError {
    #[error("enumeration over {atoms} atoms exceeds the budget of {budget}")]
    BudgetExceeded { atoms: usize, budget: usize },
    #[error("vocabulary must be non-empty and at most 6 atoms for mask-based enumeration")]
    UnsupportedVocabulary,
    #[error("no interpretation is pointwise below all models")]
    NoMinimum,
}

fn full_mask(vocab: &Vocabulary) -> u64 {
    (1u64 << vocab.world_count()) - 1
}

fn check_budget(vocab: &Vocabulary, budget: &EnumerationBudget) -> Result<(), BruteError> {
    if vocab.is_empty() || vocab.len() > 6 {
        return Err(BruteError::UnsupportedVocabulary);
    }
    if vocab.len() > budget.max_atoms {
        return Err(BruteError::BudgetExceeded {
            atoms: vocab.len(),
            budget: budget.max_atoms,
        });
    }
    Ok(())
}

fn formula_mask(f: &Formula, vocab: &Vocabulary) -> u64 {
    let mut mask = 0u64;
    for w in 0..vocab.world_count() {
        if f.evaluate_at(vocab, w)
            .expect("enumeration vocabulary must cover the formula")
        {
            mask |= 1u64 << w;
        }
    }
    mask
}

/// Visits every ordered partition of a subset of `worlds` into at most
/// `max_layers` non-empty layers (the unpartitioned rest is implicitly the
/// infinite tier), in a fixed deterministic order.
fn each_layering(
    worlds: u64,
    max_layers: usize,
    layers: &mut Vec<u64>,
    visit: &mut impl FnMut(&[u64]),
) {
    visit(layers);
    if layers.len() == max_layers || worlds == 0 {
        return;
    }
    let mut s = worlds;
    while s > 0 {
        layers.push(s);
        each_layering(worlds & !s, max_layers, layers, visit);
        layers.pop();
        s = (s - 1) & worlds;
    }
}

struct RankedQuery {
    antecedent: u64,
    consequent: u64,
}

fn ranked_queries(conditionals: &[DefeasibleConditional], vocab: &Vocabulary) -> Vec<RankedQuery> {
    conditionals
        .iter()
        .map(|c| RankedQuery {
            antecedent: formula_mask(&c.antecedent, vocab),
            consequent: formula_mask(&c.consequent, vocab),
        })
        .collect()
}

fn layers_satisfy_ranked(layers: &[u64], q: &RankedQuery) -> bool {
    for &layer in layers {
        let min = layer & q.antecedent;
        if min != 0 {
            return min & !q.consequent == 0;
        }
    }
    true
}

fn ranks_from_layers(layers: &[u64], world_count: usize) -> Vec<Option<u32>> {
    (0..world_count)
        .map(|w| {
            layers
                .iter()
                .position(|&layer| layer & (1u64 << w) != 0)
                .map(|i| i as u32)
        })
        .collect()
}

fn for_each_ranked_model(
    conditionals: &[DefeasibleConditional],
    vocab: &Vocabulary,
    budget: &EnumerationBudget,
    visit: &mut impl FnMut(&[u64]),
) -> Result<(), BruteError> {
    check_budget(vocab, budget)?;
    let queries = ranked_queries(conditionals, vocab);
    let max_layers = budget.max_rank_levels.unwrap_or(vocab.world_count());
    each_layering(
        full_mask(vocab),
        max_layers,
        &mut Vec::new(),
        &mut |layers| {
            if queries.iter().all(|q| layers_satisfy_ranked(layers, q)) {
                visit(layers);
            }
        },
    );
    Ok(())
}

/// Every convex ranked interpretation satisfying all of `conditionals`, in a
/// deterministic, duplicate-free order.
pub fn enumerate_ranked_models(
    conditionals: &[DefeasibleConditional],
    vocab: &Vocabulary,
    budget: &EnumerationBudget,
) -> Result<Vec<RankedInterpretation>, BruteError> {
    let mut out = Vec::new();
    let world_count = vocab.world_count();
    for_each_ranked_model(conditionals, vocab, budget, &mut |layers| {
        out.push(
            RankedInterpretation::from_ranks(vocab.clone(), ranks_from_layers(layers, world_count))
                .expect("layer enumeration is convex by construction"),
        );
    })?;
    Ok(out)
}

/// The pointwise minimum over all ranked models of `conditionals`.
///
/// Two visitor passes: the first folds a candidate, the second verifies it is
/// below every model. The model stream is never empty (the all-infinite
/// interpretation satisfies everything vacuously), so an inconsistent input
/// yields that interpretation rather than an error.
pub fn brute_minimal_ranked_model(
    conditionals: &[DefeasibleConditional],
    vocab: &Vocabulary,
    budget: &EnumerationBudget,
) -> Result<RankedInterpretation, BruteError> {
    let world_count = vocab.world_count();
    let mut best: Option<Vec<Option<u32>>> = None;
    for_each_ranked_model(conditionals, vocab, budget, &mut |layers| {
        let ranks = ranks_from_layers(layers, world_count);
        match &best {
            None => best = Some(ranks),
            Some(current) => {
                let leq = ranks
                    .iter()
                    .zip(current)
                    .all(|(&a, &b)| crate::semantics::ranked_leq(a, b));
                if leq {
                    best = Some(ranks);
                }
            }
        }
    })?;
    let best = best.expect("the all-infinite interpretation is always a model");
    let mut minimal = true;
    for_each_ranked_model(conditionals, vocab, budget, &mut |layers| {
        let ranks = ranks_from_layers(layers, world_count);
        if !best
            .iter()
            .zip(&ranks)
            .all(|(&a, &b)| crate::semantics::ranked_leq(a, b))
        {
            minimal = false;
        }
    })?;
    if !minimal {
        return Err(BruteError::NoMinimum);
    }
    Ok(RankedInterpretation::from_ranks(vocab.clone(), best)
        .expect("layer enumeration is convex by construction"))
}

struct SituatedQuery {
    situation: u64,
    scope: u64,
    consequent: u64,
}

fn situated_queries(kb: &Sckb, vocab: &Vocabulary) -> Vec<SituatedQuery> {
    kb.conditionals()
        .iter()
        .map(|c| {
            let situation = formula_mask(&c.situation, vocab);
            SituatedQuery {
                situation,
                scope: formula_mask(&c.antecedent, vocab) & situation,
                consequent: formula_mask(&c.consequent, vocab),
            }
        })
        .collect()
}

fn tiers_satisfy_situated(fin: &[u64], inf: &[u64], q: &SituatedQuery) -> bool {
    let fin_union = fin.iter().fold(0u64, |a, &l| a | l);
    let tier = if q.situation & fin_union != 0 {
        fin
    } else {
        inf
    };
    for &layer in tier {
        let min = layer & q.scope;
        if min != 0 {
            return min & !q.consequent == 0;
        }
    }
    true
}

fn epistemic_from_tiers(fin: &[u64], inf: &[u64], vocab: &Vocabulary) -> EpistemicInterpretation {
    let ranks = (0..vocab.world_count())
        .map(|w| {
            let bit = 1u64 << w;
            if let Some(i) = fin.iter().position(|&l| l & bit != 0) {
                Rank::Finite(i as u32)
            } else if let Some(i) = inf.iter().position(|&l| l & bit != 0) {
                Rank::Infinite(i as u32)
            } else {
                Rank::Impossible
            }
        })
        .collect();
    EpistemicInterpretation::from_ranks(vocab.clone(), ranks)
        .expect("tier enumeration is convex by construction")
}

fn for_each_epistemic_model(
    kb: &Sckb,
    vocab: &Vocabulary,
    budget: &EnumerationBudget,
    visit: &mut impl FnMut(&[u64], &[u64]),
) -> Result<(), BruteError> {
    check_budget(vocab, budget)?;
    let queries = situated_queries(kb, vocab);
    let max_layers = budget.max_rank_levels.unwrap_or(vocab.world_count());
    let all = full_mask(vocab);
    each_layering(all, max_layers, &mut Vec::new(), &mut |fin| {
        let fin = fin.to_vec();
        let remaining = all & !fin.iter().fold(0u64, |a, &l| a | l);
        each_layering(remaining, max_layers, &mut Vec::new(), &mut |inf| {
            if queries.iter().all(|q| tiers_satisfy_situated(&fin, inf, q)) {
                visit(&fin, inf);
            }
        });
    });
    Ok(())
}

/// Every convex epistemic interpretation satisfying `kb`, deterministic and
/// duplicate-free. Never empty: the all-impossible interpretation satisfies
/// every situated conditional.
pub fn enumerate_epistemic_models(
    kb: &Sckb,
    vocab: &Vocabulary,
    budget: &EnumerationBudget,
) -> Result<Vec<EpistemicInterpretation>, BruteError> {
    let mut out = Vec::new();
    for_each_epistemic_model(kb, vocab, budget, &mut |fin, inf| {
        out.push(epistemic_from_tiers(fin, inf, vocab));
    })?;
    Ok(out)
}

/// The pointwise minimum over all epistemic models of `kb`, with a full
/// verification pass that it is unique (any two pointwise minima coincide).
pub fn brute_minimal_epistemic_model(
    kb: &Sckb,
    vocab: &Vocabulary,
    budget: &EnumerationBudget,
) -> Result<EpistemicInterpretation, BruteError> {
    let mut best: Option<EpistemicInterpretation> = None;
    for_each_epistemic_model(kb, vocab, budget, &mut |fin, inf| {
        let candidate = epistemic_from_tiers(fin, inf, vocab);
        match &best {
            None => best = Some(candidate),
            Some(current) => {
                if candidate.pointwise_at_most(current) {
                    best = Some(candidate);
                }
            }
        }
    })?;
    let best = best.expect("the all-impossible interpretation is always a model");
    let mut minimal = true;
    for_each_epistemic_model(kb, vocab, budget, &mut |fin, inf| {
        if !best.pointwise_at_most(&epistemic_from_tiers(fin, inf, vocab)) {
            minimal = false;
        }
    })?;
    if !minimal {
        return Err(BruteError::NoMinimum);
    }
    Ok(best)
}

// --- postulate checking --------------------------------------------------

/// Outcome of checking one postulate over every instantiation from the
/// bounded formula grammar.
#[derive(Clone, Debug)]
pub struct PostulateResult {
    pub name: &'static str,
    pub checked: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl PostulateResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Per-postulate results. `Cons-lr` is reported like the rest but excluded
/// from [`PostulateReport::core_all_pass`]: the all-impossible interpretation
/// is a genuine countermodel for it.
#[derive(Clone, Debug)]
pub struct PostulateReport {
    pub results: Vec<PostulateResult>,
}

impl PostulateReport {
    pub fn result(&self, name: &str) -> Option<&PostulateResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// All postulates pass except possibly the left-to-right half of Cons.
    pub fn core_all_pass(&self) -> bool {
        self.results
            .iter()
            .all(|r| r.name == "Cons-lr" || r.passed())
    }
}

impl std::fmt::Display for PostulateReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in &self.results {
            write!(
                out,
                "{}: checked={} violations={}",
                r.name, r.checked, r.violations
            )?;
            if let Some(w) = &r.first_violation {
                write!(out, " first={w}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Bounded formula grammar over the first two atoms of `vocab`.
fn grammar_pool(vocab: &Vocabulary, depth: usize) -> Vec<Formula> {
    use Formula as F;
    let p = F::atom(&vocab.atoms()[0]);
    let q = vocab.atoms().get(1).map(|a| F::atom(a));
    let mut pool = vec![F::Top, F::Bot, p.clone()];
    if let Some(q) = &q {
        pool.push(q.clone());
    }
    if depth >= 1 {
        pool.push(F::not(p.clone()));
        if let Some(q) = &q {
            pool.push(F::not(q.clone()));
            pool.push(F::and(p.clone(), q.clone()));
            pool.push(F::or(p.clone(), q.clone()));
            pool.push(F::implies(p.clone(), q.clone()));
            pool.push(F::iff(p.clone(), q.clone()));
        }
    }
    if depth >= 2 {
        if let Some(q) = &q {
            pool.push(F::not(F::and(p.clone(), q.clone())));
            pool.push(F::not(F::or(p.clone(), q.clone())));
            pool.push(F::and(p.clone(), F::not(q.clone())));
            pool.push(F::or(F::not(p.clone()), q.clone()));
            pool.push(F::and(F::not(p.clone()), F::not(q.clone())));
            pool.push(F::iff(p.clone(), F::not(q.clone())));
        } else {
            pool.push(F::not(F::not(p.clone())));
            pool.push(F::and(p.clone(), p.clone()));
        }
    }
    pool
}

/// Checks the situated rationality and AGM postulates, plus Succ, Incons,
/// the guarded Cond, and both directions of Cons, over every instantiation
/// from the depth-bounded grammar.
pub fn check_postulates(e: &EpistemicInterpretation, grammar_depth: usize) -> PostulateReport {
    let vocab = e.vocab();
    assert!(vocab.len() <= 6, "postulate checking is mask-based");
    let pool = grammar_pool(vocab, grammar_depth);
    let masks: Vec<u64> = pool.iter().map(|f| formula_mask(f, vocab)).collect();
    let full = full_mask(vocab);

    let mut fin_layers: Vec<u64> = Vec::new();
    let mut inf_layers: Vec<u64> = Vec::new();
    for w in 0..e.world_count() {
        match e.rank(w) {
            Rank::Finite(i) => {
                let i = i as usize;
                if fin_layers.len() <= i {
                    fin_layers.resize(i + 1, 0);
                }
                fin_layers[i] |= 1u64 << w;
            }
            Rank::Infinite(i) => {
                let i = i as usize;
                if inf_layers.len() <= i {
                    inf_layers.resize(i + 1, 0);
                }
                inf_layers[i] |= 1u64 << w;
            }
            Rank::Impossible => {}
        }
    }
    let fin_union = fin_layers.iter().fold(0u64, |a, &l| a | l);

    let sat = |ant: u64, sit: u64, cons: u64| -> bool {
        let tier: &[u64] = if sit & fin_union != 0 {
            &fin_layers
        } else {
            &inf_layers
        };
        let scope = ant & sit;
        for &layer in tier {
            let min = layer & scope;
            if min != 0 {
                return min & !cons & full == 0;
            }
        }
        true
    };

    let witness = |names: &[(&str, usize)]| -> String {
        names
            .iter()
            .map(|(role, idx)| format!("{role}={}", pool[*idx]))
            .collect::<Vec<_>>()
            .join(", ")
    };

    let mut results = Vec::new();
    let n = pool.len();
    macro_rules! postulate {
        ($name:literal, [$($var:ident),+], $holds:expr) => {{
            let mut checked = 0u64;
            let mut violations = 0u64;
            let mut first = None;
            nested_loop!([$($var),+], n, {
                checked += 1;
                if !$holds {
                    violations += 1;
                    if first.is_none() {
                        first = Some(witness(&[$((stringify!($var), $var)),+]));
                    }
                }
            });
            results.push(PostulateResult {
                name: $name,
                checked,
                violations,
                first_violation: first,
            });
        }};
    }
    macro_rules! nested_loop {
        ([$var:ident], $n:expr, $body:block) => {
            for $var in 0..$n $body
        };
        ([$var:ident, $($rest:ident),+], $n:expr, $body:block) => {
            for $var in 0..$n { nested_loop!([$($rest),+], $n, $body) }
        };
    }

    let m = |i: usize| masks[i];
    let top = full;
    let bot = 0u64;

    postulate!("Ref", [alpha, gamma], sat(m(alpha), m(gamma), m(alpha)));
    postulate!("LLE", [alpha, beta, gamma, delta], {
        m(alpha) != m(beta)
            || !sat(m(alpha), m(gamma), m(delta))
            || sat(m(beta), m(gamma), m(delta))
    });
    postulate!("And", [alpha, beta, delta, gamma], {
        !(sat(m(alpha), m(gamma), m(beta)) && sat(m(alpha), m(gamma), m(delta)))
            || sat(m(alpha), m(gamma), m(beta) & m(delta))
    });
    postulate!("Or", [alpha, beta, delta, gamma], {
        !(sat(m(alpha), m(gamma), m(delta)) && sat(m(beta), m(gamma), m(delta)))
            || sat(m(alpha) | m(beta), m(gamma), m(delta))
    });
    postulate!("RW", [alpha, beta, delta, gamma], {
        !(m(beta) & !m(delta) & full == 0 && sat(m(alpha), m(gamma), m(beta)))
            || sat(m(alpha), m(gamma), m(delta))
    });
    postulate!("RM", [alpha, beta, delta, gamma], {
        !(sat(m(alpha), m(gamma), m(beta)) && !sat(m(alpha), m(gamma), full & !m(delta)))
            || sat(m(alpha) & m(delta), m(gamma), m(beta))
    });
    postulate!("Inc", [alpha, beta, gamma], {
        !sat(m(alpha), m(gamma), m(beta)) || sat(m(alpha) & m(gamma), top, m(beta))
    });
    postulate!("Vac", [alpha, beta, gamma], {
        !(!sat(top, top, full & !m(gamma)) && sat(m(alpha) & m(gamma), top, m(beta)))
            || sat(m(alpha), m(gamma), m(beta))
    });
    postulate!("Ext", [alpha, beta, gamma, delta], {
        m(gamma) != m(delta)
            || (sat(m(alpha), m(gamma), m(beta)) == sat(m(alpha), m(delta), m(beta)))
    });
    postulate!("SupExp", [alpha, beta, gamma, delta], {
        !sat(m(alpha), m(gamma) & m(delta), m(beta)) || sat(m(alpha) & m(gamma), m(delta), m(beta))
    });
    postulate!("SubExp", [alpha, beta, gamma, delta], {
        !(sat(m(delta), top, bot) && sat(m(alpha) & m(gamma), m(delta), m(beta)))
            || sat(m(alpha), m(gamma) & m(delta), m(beta))
    });
    postulate!("Succ", [alpha, gamma], sat(m(alpha), m(gamma), m(gamma)));
    postulate!("Incons", [alpha, beta], sat(m(alpha), bot, m(beta)));
    postulate!("Cond", [alpha, beta, gamma], {
        sat(m(gamma), top, bot)
            || (sat(m(alpha) & m(gamma), top, m(beta)) == sat(m(alpha), m(gamma), m(beta)))
    });
    postulate!(
        "Cons-rl",
        [gamma],
        m(gamma) != bot || sat(top, m(gamma), bot)
    );
    postulate!(
        "Cons-lr",
        [gamma],
        !sat(top, m(gamma), bot) || m(gamma) == bot
    );

    PostulateReport { results }
}
