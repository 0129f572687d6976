//! Ranked and epistemic interpretations: satisfaction, the transforms
//! between the two, and the constructive minimal models.
//!
//! Worlds are addressed by index (see [`Formula::evaluate_at`] for the bit
//! convention), so an interpretation is a rank vector of length `2^n`.

use std::fmt;

use crate::closure::{compute_ranking, derive_kbs_with, ExceptionalityRanking};
use crate::kb::{conjunctive_form, materialise, DefeasibleConditional, Sckb, SituatedConditional};
use crate::prop::{EntailmentOracle, Formula, Vocabulary};
use thiserror::Error;

/// Cap on the vocabulary size of model-level operations.
pub const MAX_MODEL_ATOMS: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("semantic operations need a non-empty vocabulary")]
    EmptyVocabulary,
    #[error("model over {atoms} atoms exceeds the cap of {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },
    #[error("conditional mentions atom `{0}` outside the vocabulary")]
    UnknownAtom(String),
    #[error("the knowledge base is inconsistent")]
    InconsistentKb,
    #[error("rank assignment violates convexity")]
    NotConvex,
}

/// Epistemic rank of a world. Lower is more expected; the derived order is
/// exactly `Finite(0) < Finite(1) < ... < Infinite(0) < ... < Impossible`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    /// Plausible, with a degree of typicality.
    Finite(u32),
    /// Implausible but possible.
    Infinite(u32),
    /// Ruled out in every situation.
    Impossible,
}

impl fmt::Display for Rank {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(i) => write!(out, "(f,{i})"),
            Rank::Infinite(i) => write!(out, "(inf,{i})"),
            Rank::Impossible => write!(out, "(inf,inf)"),
        }
    }
}

/// `a <= b` where `None` means the infinite rank.
pub fn ranked_leq(a: Option<u32>, b: Option<u32>) -> bool {
    match (a, b) {
        (Some(i), Some(j)) => i <= j,
        (_, None) => true,
        (None, Some(_)) => false,
    }
}

fn check_vocab(vocab: &Vocabulary) -> Result<(), SemanticsError> {
    if vocab.is_empty() {
        return Err(SemanticsError::EmptyVocabulary);
    }
    if vocab.len() > MAX_MODEL_ATOMS {
        return Err(SemanticsError::TooManyAtoms {
            atoms: vocab.len(),
            cap: MAX_MODEL_ATOMS,
        });
    }
    Ok(())
}

fn check_atoms(
    conditionals: &[DefeasibleConditional],
    vocab: &Vocabulary,
) -> Result<(), SemanticsError> {
    for c in conditionals {
        for f in [&c.antecedent, &c.consequent] {
            for atom in f.atoms() {
                if !vocab.contains(&atom) {
                    return Err(SemanticsError::UnknownAtom(atom));
                }
            }
        }
    }
    Ok(())
}

fn eval(f: &Formula, vocab: &Vocabulary, world: usize) -> bool {
    match f.evaluate_at(vocab, world) {
        Ok(b) => b,
        Err(e) => panic!("formula mentions an atom outside the model vocabulary: {e}"),
    }
}

/// Convex map from worlds to `N ∪ {∞}` (`None` is the infinite rank).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedInterpretation {
    vocab: Vocabulary,
    ranks: Vec<Option<u32>>,
}

fn finite_levels_convex(levels: impl Iterator<Item = u32>) -> bool {
    let mut seen: Vec<bool> = Vec::new();
    for i in levels {
        let i = i as usize;
        if i >= seen.len() {
            seen.resize(i + 1, false);
        }
        seen[i] = true;
    }
    seen.iter().all(|&b| b)
}

impl RankedInterpretation {
    pub fn from_ranks(vocab: Vocabulary, ranks: Vec<Option<u32>>) -> Result<Self, SemanticsError> {
        check_vocab(&vocab)?;
        assert_eq!(ranks.len(), vocab.world_count(), "one rank per world");
        if !finite_levels_convex(ranks.iter().flatten().copied()) {
            return Err(SemanticsError::NotConvex);
        }
        Ok(RankedInterpretation { vocab, ranks })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn rank(&self, world: usize) -> Option<u32> {
        self.ranks[world]
    }

    pub fn world_count(&self) -> usize {
        self.ranks.len()
    }

    /// Worlds with a finite rank.
    pub fn plausible_worlds(&self) -> Vec<usize> {
        (0..self.ranks.len())
            .filter(|&w| self.ranks[w].is_some())
            .collect()
    }

    /// True iff the most typical plausible antecedent worlds all satisfy the
    /// consequent; vacuously true when the antecedent has no plausible world.
    pub fn satisfies(&self, c: &DefeasibleConditional) -> bool {
        let min = (0..self.ranks.len())
            .filter_map(|w| self.ranks[w].filter(|_| eval(&c.antecedent, &self.vocab, w)))
            .min();
        match min {
            None => true,
            Some(level) => (0..self.ranks.len()).all(|w| {
                self.ranks[w] != Some(level)
                    || !eval(&c.antecedent, &self.vocab, w)
                    || eval(&c.consequent, &self.vocab, w)
            }),
        }
    }

    pub fn satisfies_all(&self, conditionals: &[DefeasibleConditional]) -> bool {
        conditionals.iter().all(|c| self.satisfies(c))
    }

    /// `self(w) <= other(w)` for every world.
    pub fn pointwise_at_most(&self, other: &RankedInterpretation) -> bool {
        self.ranks
            .iter()
            .zip(&other.ranks)
            .all(|(&a, &b)| ranked_leq(a, b))
    }

    /// The epistemic interpretation with the same finite layers and every
    /// infinite-rank world made impossible.
    pub fn to_epistemic(&self) -> EpistemicInterpretation {
        let ranks = self
            .ranks
            .iter()
            .map(|r| match r {
                Some(i) => Rank::Finite(*i),
                None => Rank::Impossible,
            })
            .collect();
        EpistemicInterpretation {
            vocab: self.vocab.clone(),
            ranks,
        }
    }

    /// Layers from the highest rank down, worlds ascending within a layer.
    pub fn layers(&self) -> Vec<(Option<u32>, Vec<usize>)> {
        let mut out = Vec::new();
        let infinite: Vec<usize> = (0..self.ranks.len())
            .filter(|&w| self.ranks[w].is_none())
            .collect();
        if !infinite.is_empty() {
            out.push((None, infinite));
        }
        let max = self.ranks.iter().flatten().copied().max();
        if let Some(max) = max {
            for level in (0..=max).rev() {
                let worlds: Vec<usize> = (0..self.ranks.len())
                    .filter(|&w| self.ranks[w] == Some(level))
                    .collect();
                out.push((Some(level), worlds));
            }
        }
        out
    }

    pub fn layer_lines(&self) -> Vec<String> {
        self.layers()
            .into_iter()
            .map(|(rank, worlds)| {
                let label = match rank {
                    Some(i) => i.to_string(),
                    None => "inf".to_string(),
                };
                format!("{label}: {}", render_worlds(&worlds, &self.vocab))
            })
            .collect()
    }
}

impl fmt::Display for RankedInterpretation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_layer_lines(out, &self.layer_lines())
    }
}

/// Convex two-tier map from worlds to epistemic ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicInterpretation {
    vocab: Vocabulary,
    ranks: Vec<Rank>,
}

/// True iff both the finite and the possible-infinite tiers are convex.
pub fn is_convex_assignment(ranks: &[Rank]) -> bool {
    finite_levels_convex(ranks.iter().filter_map(|r| match r {
        Rank::Finite(i) => Some(*i),
        _ => None,
    })) && finite_levels_convex(ranks.iter().filter_map(|r| match r {
        Rank::Infinite(i) => Some(*i),
        _ => None,
    }))
}

impl EpistemicInterpretation {
    pub fn from_ranks(vocab: Vocabulary, ranks: Vec<Rank>) -> Result<Self, SemanticsError> {
        check_vocab(&vocab)?;
        assert_eq!(ranks.len(), vocab.world_count(), "one rank per world");
        if !is_convex_assignment(&ranks) {
            return Err(SemanticsError::NotConvex);
        }
        Ok(EpistemicInterpretation { vocab, ranks })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn rank(&self, world: usize) -> Rank {
        self.ranks[world]
    }

    pub fn ranks(&self) -> &[Rank] {
        &self.ranks
    }

    pub fn world_count(&self) -> usize {
        self.ranks.len()
    }

    pub fn plausible_worlds(&self) -> Vec<usize> {
        (0..self.ranks.len())
            .filter(|&w| matches!(self.ranks[w], Rank::Finite(_)))
            .collect()
    }

    /// Implausible worlds that are still possible (the impossible rank is
    /// excluded).
    pub fn possible_infinite_worlds(&self) -> Vec<usize> {
        (0..self.ranks.len())
            .filter(|&w| matches!(self.ranks[w], Rank::Infinite(_)))
            .collect()
    }

    /// Situated satisfaction. When the situation holds in some plausible
    /// world the conditional is judged on the finite tier, otherwise on the
    /// possible-infinite tier; an empty tier judges it vacuously true.
    pub fn satisfies(&self, c: &SituatedConditional) -> bool {
        let situation_plausible = (0..self.ranks.len()).any(|w| {
            matches!(self.ranks[w], Rank::Finite(_)) && eval(&c.situation, &self.vocab, w)
        });
        let tier_level = |w: usize| match (situation_plausible, self.ranks[w]) {
            (true, Rank::Finite(i)) => Some(i),
            (false, Rank::Infinite(i)) => Some(i),
            _ => None,
        };
        let in_scope =
            |w: usize| eval(&c.antecedent, &self.vocab, w) && eval(&c.situation, &self.vocab, w);
        let min = (0..self.ranks.len())
            .filter_map(|w| tier_level(w).filter(|_| in_scope(w)))
            .min();
        match min {
            None => true,
            Some(level) => (0..self.ranks.len()).all(|w| {
                tier_level(w) != Some(level) || !in_scope(w) || eval(&c.consequent, &self.vocab, w)
            }),
        }
    }

    pub fn satisfies_all(&self, kb: &Sckb) -> bool {
        kb.conditionals().iter().all(|c| self.satisfies(c))
    }

    /// `self(w) <= other(w)` for every world.
    pub fn pointwise_at_most(&self, other: &EpistemicInterpretation) -> bool {
        self.ranks.iter().zip(&other.ranks).all(|(a, b)| a <= b)
    }

    /// The ranked interpretation keeping the finite tier and collapsing
    /// everything else to the infinite rank.
    pub fn to_ranked(&self) -> RankedInterpretation {
        let ranks = self
            .ranks
            .iter()
            .map(|r| match r {
                Rank::Finite(i) => Some(*i),
                _ => None,
            })
            .collect();
        RankedInterpretation {
            vocab: self.vocab.clone(),
            ranks,
        }
    }

    /// Promotes the possible-infinite tier to the finite tier and sends
    /// everything else to the impossible rank.
    pub fn counterfactual_shift(&self) -> EpistemicInterpretation {
        let ranks = self
            .ranks
            .iter()
            .map(|r| match r {
                Rank::Infinite(i) => Rank::Finite(*i),
                _ => Rank::Impossible,
            })
            .collect();
        EpistemicInterpretation {
            vocab: self.vocab.clone(),
            ranks,
        }
    }

    /// Layers from the highest rank down, worlds ascending within a layer.
    /// Empty layers are omitted (only the impossible layer can be empty).
    pub fn layers(&self) -> Vec<(Rank, Vec<usize>)> {
        let mut order: Vec<Rank> = vec![Rank::Impossible];
        let max_inf = self
            .ranks
            .iter()
            .filter_map(|r| match r {
                Rank::Infinite(i) => Some(*i),
                _ => None,
            })
            .max();
        if let Some(max) = max_inf {
            order.extend((0..=max).rev().map(Rank::Infinite));
        }
        let max_fin = self
            .ranks
            .iter()
            .filter_map(|r| match r {
                Rank::Finite(i) => Some(*i),
                _ => None,
            })
            .max();
        if let Some(max) = max_fin {
            order.extend((0..=max).rev().map(Rank::Finite));
        }
        order
            .into_iter()
            .filter_map(|rank| {
                let worlds: Vec<usize> = (0..self.ranks.len())
                    .filter(|&w| self.ranks[w] == rank)
                    .collect();
                if worlds.is_empty() {
                    None
                } else {
                    Some((rank, worlds))
                }
            })
            .collect()
    }

    pub fn layer_lines(&self) -> Vec<String> {
        self.layers()
            .into_iter()
            .map(|(rank, worlds)| format!("{rank}: {}", render_worlds(&worlds, &self.vocab)))
            .collect()
    }
}

impl fmt::Display for EpistemicInterpretation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_layer_lines(out, &self.layer_lines())
    }
}

fn write_layer_lines(out: &mut fmt::Formatter<'_>, lines: &[String]) -> fmt::Result {
    for (i, line) in lines.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        write!(out, "{line}")?;
    }
    Ok(())
}

fn render_worlds(worlds: &[usize], vocab: &Vocabulary) -> String {
    let n = vocab.len();
    worlds
        .iter()
        .map(|&w| {
            vocab
                .atoms()
                .iter()
                .enumerate()
                .map(|(j, atom)| {
                    if w & (1usize << (n - 1 - j)) != 0 {
                        atom.clone()
                    } else {
                        format!("~{atom}")
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("  ")
}

/// Rank assignment realizing a ranking's minimal model: a world's rank is the
/// least stratum whose materialisation it satisfies, the single level above
/// the strata when it only satisfies the fixpoint's, and infinite otherwise.
/// An inconsistent input yields the all-infinite interpretation.
pub(crate) fn ranked_model_from_ranking(
    ranking: &ExceptionalityRanking,
    vocab: &Vocabulary,
) -> RankedInterpretation {
    let strata_material: Vec<Vec<Formula>> =
        ranking.strata().iter().map(|s| materialise(s)).collect();
    let fixpoint_material = materialise(ranking.fixpoint());
    let ranks = (0..vocab.world_count())
        .map(|w| {
            let holds = |set: &[Formula]| set.iter().all(|f| eval(f, vocab, w));
            if !holds(&fixpoint_material) {
                return None;
            }
            for (i, material) in strata_material.iter().enumerate() {
                if holds(material) {
                    return Some(i as u32);
                }
            }
            Some(strata_material.len() as u32)
        })
        .collect();
    RankedInterpretation {
        vocab: vocab.clone(),
        ranks,
    }
}

/// The minimum ranked model of `conditionals` under the pointwise order:
/// every ranked model of the conditionals dominates it.
pub fn minimal_ranked_model(
    oracle: &mut EntailmentOracle,
    conditionals: &[DefeasibleConditional],
    vocab: &Vocabulary,
) -> Result<RankedInterpretation, SemanticsError> {
    check_vocab(vocab)?;
    check_atoms(conditionals, vocab)?;
    if !oracle.is_satisfiable(&materialise(conditionals)) {
        return Err(SemanticsError::InconsistentKb);
    }
    let ranking = compute_ranking(oracle, conditionals);
    let model = ranked_model_from_ranking(&ranking, vocab);
    debug_assert!(model.satisfies_all(conditionals));
    Ok(model)
}

/// The minimal ranked model of the conjunctive form, with every implausible
/// world made impossible.
pub fn classical_epistemic_model(
    oracle: &mut EntailmentOracle,
    kb: &Sckb,
) -> Result<EpistemicInterpretation, SemanticsError> {
    let ranked = minimal_ranked_model(oracle, &conjunctive_form(kb), kb.vocab())?;
    Ok(ranked.to_epistemic())
}

/// The unique minimal epistemic model of a consistent KB.
///
/// The finite tier comes from the minimal ranked model of the conjunctive
/// form; the infinite tier ranks the remaining worlds by the minimal ranked
/// model of the shifted counterfactual KB (all-impossible when that KB is
/// inconsistent).
pub fn minimal_epistemic_model(
    oracle: &mut EntailmentOracle,
    kb: &Sckb,
) -> Result<EpistemicInterpretation, SemanticsError> {
    let vocab = kb.vocab();
    check_vocab(vocab)?;
    let conjunctive = conjunctive_form(kb);
    if !oracle.is_satisfiable(&materialise(&conjunctive)) {
        return Err(SemanticsError::InconsistentKb);
    }
    let ranking = compute_ranking(oracle, &conjunctive);
    let finite_tier = ranked_model_from_ranking(&ranking, vocab);
    let derived = derive_kbs_with(oracle, kb, conjunctive, &ranking);
    let shifted_ranking = compute_ranking(oracle, &derived.shifted);
    let infinite_tier = ranked_model_from_ranking(&shifted_ranking, vocab);
    let ranks: Vec<Rank> = (0..vocab.world_count())
        .map(|w| match finite_tier.rank(w) {
            Some(i) => Rank::Finite(i),
            None => match infinite_tier.rank(w) {
                Some(i) => Rank::Infinite(i),
                None => Rank::Impossible,
            },
        })
        .collect();
    debug_assert!(is_convex_assignment(&ranks));
    let model = EpistemicInterpretation {
        vocab: vocab.clone(),
        ranks,
    };
    debug_assert!(model.satisfies_all(kb));
    Ok(model)
}
