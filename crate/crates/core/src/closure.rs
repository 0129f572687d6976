//! Exceptionality ranking, rational closure, and minimal closure.
//!
//! Every decision here reduces to classical entailment checks against the
//! supplied oracle; nothing inspects models directly. The semantics module
//! carries the model-theoretic counterparts these procedures are validated
//! against.

use std::sync::OnceLock;

use crate::kb::{
    conjunctive_form, materialise, plausible_region_formula, DefeasibleConditional, DerivedKbs,
    Sckb, SituatedConditional,
};
use crate::prop::{EntailmentOracle, Formula};

/// The exceptionality stratification of a conditional knowledge base.
///
/// `strata` holds the strictly shrinking pre-fixpoint sets; `fixpoint` is the
/// set the exceptionality operator maps to itself. When the input is its own
/// fixpoint the single stratum equals it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalityRanking {
    strata: Vec<Vec<DefeasibleConditional>>,
    fixpoint: Vec<DefeasibleConditional>,
}

impl ExceptionalityRanking {
    pub fn strata(&self) -> &[Vec<DefeasibleConditional>] {
        &self.strata
    }

    pub fn fixpoint(&self) -> &[DefeasibleConditional] {
        &self.fixpoint
    }

    /// The stratum a rank selects for closure queries. Both `InfinityLevel`
    /// and `Infinite` select the fixpoint, which makes the lookup total.
    pub fn stratum(&self, rank: FormulaRank) -> &[DefeasibleConditional] {
        match rank {
            FormulaRank::Finite(i) => &self.strata[i],
            FormulaRank::InfinityLevel | FormulaRank::Infinite => &self.fixpoint,
        }
    }
}

/// The rank of a formula against a ranking.
///
/// `InfinityLevel` marks formulas refuted by every stratum's materialisation
/// but consistent with the fixpoint's: their models sit on the single finite
/// level above the strata in the minimal ranked model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaRank {
    Finite(usize),
    InfinityLevel,
    Infinite,
}

impl FormulaRank {
    pub fn is_infinite(self) -> bool {
        self == FormulaRank::Infinite
    }
}

impl std::fmt::Display for FormulaRank {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormulaRank::Finite(i) => write!(out, "{i}"),
            FormulaRank::InfinityLevel => write!(out, "inf-level"),
            FormulaRank::Infinite => write!(out, "infinite"),
        }
    }
}

/// The conditionals of `c` whose antecedents are refuted by the
/// materialisation of `c`, order preserved.
pub fn exceptional(
    oracle: &mut EntailmentOracle,
    c: &[DefeasibleConditional],
) -> Vec<DefeasibleConditional> {
    let material = materialise(c);
    c.iter()
        .filter(|cond| oracle.entails(&material, &Formula::not(cond.antecedent.clone())))
        .cloned()
        .collect()
}

/// Iterates [`exceptional`] to its fixpoint and returns the stratification.
pub fn compute_ranking(
    oracle: &mut EntailmentOracle,
    c: &[DefeasibleConditional],
) -> ExceptionalityRanking {
    let mut strata = vec![c.to_vec()];
    loop {
        let current = strata.last().unwrap();
        let next = exceptional(oracle, current);
        if &next == current {
            let fixpoint = strata.pop().unwrap();
            if strata.is_empty() {
                // Degenerate case: the input is already exceptional with
                // itself, so the single stratum and the fixpoint coincide.
                strata.push(fixpoint.clone());
            }
            return ExceptionalityRanking { strata, fixpoint };
        }
        strata.push(next);
    }
}

/// Rank of `f` against a precomputed ranking: the least stratum whose
/// materialisation does not refute `f`.
pub fn formula_rank_with(
    oracle: &mut EntailmentOracle,
    ranking: &ExceptionalityRanking,
    f: &Formula,
) -> FormulaRank {
    let negated = Formula::not(f.clone());
    for (i, stratum) in ranking.strata().iter().enumerate() {
        if !oracle.entails(&materialise(stratum), &negated) {
            return FormulaRank::Finite(i);
        }
    }
    if !oracle.entails(&materialise(ranking.fixpoint()), &negated) {
        FormulaRank::InfinityLevel
    } else {
        FormulaRank::Infinite
    }
}

/// Rank of `f` with respect to the conditionals `c`.
pub fn formula_rank(
    oracle: &mut EntailmentOracle,
    c: &[DefeasibleConditional],
    f: &Formula,
) -> FormulaRank {
    let ranking = compute_ranking(oracle, c);
    formula_rank_with(oracle, &ranking, f)
}

/// Rational-closure membership against a precomputed ranking.
pub fn rational_closure_with(
    oracle: &mut EntailmentOracle,
    ranking: &ExceptionalityRanking,
    query: &DefeasibleConditional,
) -> bool {
    let rank = formula_rank_with(oracle, ranking, &query.antecedent);
    let mut premises = materialise(ranking.stratum(rank));
    premises.push(query.antecedent.clone());
    // An antecedent of infinite rank contradicts the fixpoint's
    // materialisation, so the check below is vacuously true.
    oracle.entails(&premises, &query.consequent)
}

/// True iff `query` is in the rational closure of `c`.
pub fn rational_closure(
    oracle: &mut EntailmentOracle,
    c: &[DefeasibleConditional],
    query: &DefeasibleConditional,
) -> bool {
    let ranking = compute_ranking(oracle, c);
    rational_closure_with(oracle, &ranking, query)
}

/// True iff the materialisation of the conjunctive form is satisfiable.
pub fn is_consistent(oracle: &mut EntailmentOracle, kb: &Sckb) -> bool {
    oracle.is_satisfiable(&materialise(&conjunctive_form(kb)))
}

pub(crate) fn derive_kbs_with(
    oracle: &mut EntailmentOracle,
    kb: &Sckb,
    conjunctive: Vec<DefeasibleConditional>,
    ranking: &ExceptionalityRanking,
) -> DerivedKbs {
    let mut counterfactual = Vec::new();
    for c in kb.conditionals() {
        if formula_rank_with(oracle, ranking, &c.situation).is_infinite() {
            counterfactual.push(c.clone());
        }
    }
    let plausible_region = plausible_region_formula(ranking.fixpoint());
    let mut shifted: Vec<DefeasibleConditional> =
        counterfactual.iter().map(|c| c.conjunctive()).collect();
    shifted.push(DefeasibleConditional::new(
        plausible_region.clone(),
        Formula::Bot,
    ));
    DerivedKbs {
        conjunctive,
        counterfactual,
        shifted,
        plausible_region,
    }
}

/// Splits a KB into its conjunctive form and the shifted counterfactual KB.
pub fn partition(oracle: &mut EntailmentOracle, kb: &Sckb) -> DerivedKbs {
    let conjunctive = conjunctive_form(kb);
    let ranking = compute_ranking(oracle, &conjunctive);
    derive_kbs_with(oracle, kb, conjunctive, &ranking)
}

/// True iff `query` is in the minimal closure of `kb`.
///
/// An inconsistent KB minimally entails everything. Otherwise the situation's
/// rank selects which derived KB answers the query: the conjunctive form when
/// the situation is possible at some finite level, the shifted KB when it is
/// not.
pub fn minimal_closure(
    oracle: &mut EntailmentOracle,
    kb: &Sckb,
    query: &SituatedConditional,
) -> bool {
    let conjunctive = conjunctive_form(kb);
    let ranking = compute_ranking(oracle, &conjunctive);
    let derived = derive_kbs_with(oracle, kb, conjunctive, &ranking);
    if !oracle.is_satisfiable(&materialise(&derived.conjunctive)) {
        return true;
    }
    let situation_rank = formula_rank_with(oracle, &ranking, &query.situation);
    if !situation_rank.is_infinite() {
        rational_closure_with(oracle, &ranking, &query.conjunctive())
    } else {
        let shifted_ranking = compute_ranking(oracle, &derived.shifted);
        rational_closure_with(oracle, &shifted_ranking, &query.conjunctive())
    }
}

/// A knowledge base compiled for batch querying: the derived KBs and their
/// rankings are computed once and reused. Immutable after construction;
/// concurrent queries should each bring their own oracle.
#[derive(Debug)]
pub struct CompiledKb {
    kb: Sckb,
    derived: DerivedKbs,
    conjunctive_ranking: ExceptionalityRanking,
    conjunctive_material: Vec<Formula>,
    shifted_ranking: OnceLock<ExceptionalityRanking>,
}

impl CompiledKb {
    pub fn new(oracle: &mut EntailmentOracle, kb: Sckb) -> Self {
        let conjunctive = conjunctive_form(&kb);
        let conjunctive_ranking = compute_ranking(oracle, &conjunctive);
        let derived = derive_kbs_with(oracle, &kb, conjunctive, &conjunctive_ranking);
        let conjunctive_material = materialise(&derived.conjunctive);
        CompiledKb {
            kb,
            derived,
            conjunctive_ranking,
            conjunctive_material,
            shifted_ranking: OnceLock::new(),
        }
    }

    pub fn kb(&self) -> &Sckb {
        &self.kb
    }

    pub fn derived(&self) -> &DerivedKbs {
        &self.derived
    }

    pub fn ranking(&self) -> &ExceptionalityRanking {
        &self.conjunctive_ranking
    }

    /// Minimal-closure membership using the cached rankings.
    pub fn query(&self, oracle: &mut EntailmentOracle, query: &SituatedConditional) -> bool {
        if !oracle.is_satisfiable(&self.conjunctive_material) {
            return true;
        }
        let situation_rank = formula_rank_with(oracle, &self.conjunctive_ranking, &query.situation);
        if !situation_rank.is_infinite() {
            rational_closure_with(oracle, &self.conjunctive_ranking, &query.conjunctive())
        } else {
            let shifted = self
                .shifted_ranking
                .get_or_init(|| compute_ranking(oracle, &self.derived.shifted));
            rational_closure_with(oracle, shifted, &query.conjunctive())
        }
    }
}
