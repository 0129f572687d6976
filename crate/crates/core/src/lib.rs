//! Reasoning engine for situated conditional knowledge bases.
//!
//! A knowledge base is a set of statements `A |~[G] B`: "given the situation
//! `G`, if `A` then normally `B`". The engine decides consistency, rational
//! closure, and minimal closure of such bases through a series of classical
//! propositional entailment checks, and carries a brute-force semantic oracle
//! that validates the algorithms against the ranked-model definitions on
//! small vocabularies.
//!
//! Layering, bottom up:
//!
//! - [`prop`] — formulas, valuations, parsing, and the entailment oracle;
//! - [`kb`] — conditionals, knowledge bases, and their derived forms;
//! - [`closure`] — the exceptionality ranking and the closure procedures;
//! - [`semantics`] — ranked/epistemic interpretations and minimal models;
//! - [`brute`] — exhaustive enumeration and the postulate checker.

pub mod brute;
pub mod closure;
pub mod kb;
pub mod prop;
pub mod semantics;

pub use closure::{
    compute_ranking, exceptional, formula_rank, is_consistent, minimal_closure, rational_closure,
    CompiledKb, ExceptionalityRanking, FormulaRank,
};
pub use kb::{
    conjunctive_form, materialise, parse_query, DefeasibleConditional, DerivedKbs, Sckb,
    SituatedConditional,
};
pub use prop::{
    characteristic_formula, models, parse_formula, parse_formula_strict, Backend, EntailmentOracle,
    Formula, Valuation, Vocabulary,
};
pub use semantics::{
    classical_epistemic_model, minimal_epistemic_model, minimal_ranked_model,
    EpistemicInterpretation, Rank, RankedInterpretation,
};
