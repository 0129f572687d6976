//! Propositional layer: formulas, valuations, and the entailment oracle.
//!
//! Everything above this module (conditionals, ranked semantics, the closure
//! algorithms) reduces to these primitives.

mod oracle;
mod parse;

pub use oracle::{Backend, EntailmentOracle};
pub use parse::{parse_formula, parse_formula_strict, ParseError};

pub(crate) use parse::{parse_tokens, tokenize, Token, VocabMode};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Hard cap on truth-table enumeration, ~10^6 rows.
pub const MAX_ENUM_ATOMS: usize = 20;

/// Ordered set of distinct atom names.
///
/// Atoms are kept in first-appearance order; lookups are linear, which is
/// fine for the vocabulary sizes this engine targets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    atoms: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabError {
    #[error("invalid atom name `{0}`")]
    InvalidName(String),
}

pub(crate) fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "true" && name != "false"
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary { atoms: Vec::new() }
    }

    /// Builds a vocabulary from names, deduplicating while preserving
    /// first-appearance order.
    pub fn from_atoms<I, S>(names: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut v = Vocabulary::new();
        for name in names {
            let name = name.as_ref();
            if !is_valid_atom_name(name) {
                return Err(VocabError::InvalidName(name.to_string()));
            }
            v.add(name);
        }
        Ok(v)
    }

    /// Inserts an atom if absent; returns its index either way.
    pub fn add(&mut self, name: &str) -> usize {
        match self.index_of(name) {
            Some(i) => i,
            None => {
                self.atoms.push(name.to_string());
                self.atoms.len() - 1
            }
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Number of valuations over this vocabulary.
    pub fn world_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    /// Extends with every atom of `f`, in appearance order.
    pub fn absorb(&mut self, f: &Formula) {
        f.visit_atoms(&mut |name| {
            self.add(name);
        });
    }
}

/// Propositional sentence over named atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("valuation does not assign atom `{0}`")]
    MissingAtom(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("enumeration over {atoms} atoms exceeds the cap of {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },
    #[error("formula mentions atom `{0}` outside the vocabulary")]
    UnknownAtom(String),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Conjunction of `items`, folded left; the empty conjunction is `Top`.
    pub fn conjoin<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of `items`, folded left; the empty disjunction is `Bot`.
    pub fn disjoin<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Bot,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    fn visit_atoms(&self, f: &mut impl FnMut(&str)) {
        match self {
            Formula::Atom(name) => f(name),
            Formula::Top | Formula::Bot => {}
            Formula::Not(x) => x.visit_atoms(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Atom names of the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.visit_atoms(&mut |name| {
            set.insert(name.to_string());
        });
        set
    }

    /// Classical truth-table evaluation under `v`.
    pub fn evaluate(&self, v: &Valuation) -> Result<bool, EvalError> {
        self.evaluate_with(&|name| v.get(name))
    }

    /// Evaluation against an arbitrary assignment lookup.
    pub fn evaluate_with(&self, lookup: &impl Fn(&str) -> Option<bool>) -> Result<bool, EvalError> {
        Ok(match self {
            Formula::Atom(name) => {
                lookup(name).ok_or_else(|| EvalError::MissingAtom(name.clone()))?
            }
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Not(x) => !x.evaluate_with(lookup)?,
            Formula::And(a, b) => a.evaluate_with(lookup)? && b.evaluate_with(lookup)?,
            Formula::Or(a, b) => a.evaluate_with(lookup)? || b.evaluate_with(lookup)?,
            Formula::Implies(a, b) => !a.evaluate_with(lookup)? || b.evaluate_with(lookup)?,
            Formula::Iff(a, b) => a.evaluate_with(lookup)? == b.evaluate_with(lookup)?,
        })
    }

    /// Evaluation at the world with the given index over `vocab`.
    ///
    /// Atom `j` is true at world `w` iff bit `n-1-j` of `w` is set, so world
    /// indices sort valuations by their vocabulary-order bitstring.
    pub fn evaluate_at(&self, vocab: &Vocabulary, world: usize) -> Result<bool, EvalError> {
        let n = vocab.len();
        self.evaluate_with(&|name| {
            vocab
                .index_of(name)
                .map(|j| world & (1usize << (n - 1 - j)) != 0)
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            Formula::Atom(_) | Formula::Top | Formula::Bot => 6,
        }
    }

    fn fmt_prec(&self, out: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(out, "(")?;
        }
        match self {
            Formula::Atom(name) => write!(out, "{name}")?,
            Formula::Top => write!(out, "true")?,
            Formula::Bot => write!(out, "false")?,
            Formula::Not(x) => {
                write!(out, "~")?;
                x.fmt_prec(out, 5)?;
            }
            // `&` and `|` render left-associative, `->` and `<->` right-associative.
            Formula::And(a, b) => {
                a.fmt_prec(out, 4)?;
                write!(out, " & ")?;
                b.fmt_prec(out, 5)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(out, 3)?;
                write!(out, " | ")?;
                b.fmt_prec(out, 4)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(out, 3)?;
                write!(out, " -> ")?;
                b.fmt_prec(out, 2)?;
            }
            Formula::Iff(a, b) => {
                a.fmt_prec(out, 2)?;
                write!(out, " <-> ")?;
                b.fmt_prec(out, 1)?;
            }
        }
        if prec < min {
            write!(out, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(out, 0)
    }
}

/// Total truth assignment over a vocabulary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    vocab: Arc<Vocabulary>,
    bits: Vec<bool>,
}

impl Valuation {
    /// The valuation with the given world index (see [`Formula::evaluate_at`]).
    pub fn from_world(vocab: Arc<Vocabulary>, world: usize) -> Valuation {
        let n = vocab.len();
        debug_assert!(world < vocab.world_count());
        let bits = (0..n)
            .map(|j| world & (1usize << (n - 1 - j)) != 0)
            .collect();
        Valuation { vocab, bits }
    }

    pub fn world(&self) -> usize {
        let n = self.bits.len();
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0usize, |acc, (j, _)| acc | 1usize << (n - 1 - j))
    }

    pub fn get(&self, atom: &str) -> Option<bool> {
        self.vocab.index_of(atom).map(|j| self.bits[j])
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, atom) in self.vocab.atoms().iter().enumerate() {
            if j > 0 {
                write!(out, " ")?;
            }
            if !self.bits[j] {
                write!(out, "~")?;
            }
            write!(out, "{atom}")?;
        }
        Ok(())
    }
}

/// All valuations over `vocab` satisfying `f`, in world-index order.
pub fn models(f: &Formula, vocab: &Vocabulary) -> Result<Vec<Valuation>, EnumerationError> {
    let worlds = model_worlds(f, vocab)?;
    let shared = Arc::new(vocab.clone());
    Ok(worlds
        .into_iter()
        .map(|w| Valuation::from_world(Arc::clone(&shared), w))
        .collect())
}

/// World indices over `vocab` satisfying `f`, ascending.
pub fn model_worlds(f: &Formula, vocab: &Vocabulary) -> Result<Vec<usize>, EnumerationError> {
    if vocab.len() > MAX_ENUM_ATOMS {
        return Err(EnumerationError::TooManyAtoms {
            atoms: vocab.len(),
            cap: MAX_ENUM_ATOMS,
        });
    }
    for atom in f.atoms() {
        if !vocab.contains(&atom) {
            return Err(EnumerationError::UnknownAtom(atom));
        }
    }
    let mut out = Vec::new();
    for w in 0..vocab.world_count() {
        if f.evaluate_at(vocab, w).expect("atoms checked above") {
            out.push(w);
        }
    }
    Ok(out)
}

/// A sentence whose models are exactly the worlds in `worlds`: a disjunction
/// of full minterms in world-index order, `false` for the empty set.
pub fn characteristic_formula_of_worlds(worlds: &[usize], vocab: &Vocabulary) -> Formula {
    let mut sorted: Vec<usize> = worlds.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let n = vocab.len();
    Formula::disjoin(sorted.into_iter().map(|w| {
        Formula::conjoin(vocab.atoms().iter().enumerate().map(|(j, atom)| {
            if w & (1usize << (n - 1 - j)) != 0 {
                Formula::atom(atom)
            } else {
                Formula::not(Formula::atom(atom))
            }
        }))
    }))
}

/// [`characteristic_formula_of_worlds`] over explicit valuations.
pub fn characteristic_formula(valuations: &[Valuation], vocab: &Vocabulary) -> Formula {
    let worlds: Vec<usize> = valuations
        .iter()
        .map(|v| {
            debug_assert_eq!(
                v.vocab(),
                vocab,
                "valuation built over a different vocabulary"
            );
            v.world()
        })
        .collect();
    characteristic_formula_of_worlds(&worlds, vocab)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(names: &[&str]) -> Vocabulary {
        Vocabulary::from_atoms(names.iter().copied()).unwrap()
    }

    #[test]
    fn vocabulary_keeps_first_appearance_order() {
        let v = Vocabulary::from_atoms(["q", "p", "q", "r"]).unwrap();
        assert_eq!(v.atoms(), &["q", "p", "r"]);
    }

    #[test]
    fn vocabulary_rejects_bad_names() {
        assert!(Vocabulary::from_atoms(["1p"]).is_err());
        assert!(Vocabulary::from_atoms(["true"]).is_err());
        assert!(Vocabulary::from_atoms(["p-q"]).is_err());
    }

    #[test]
    fn evaluate_matches_truth_tables() {
        let v = vocab(&["p", "b"]);
        let shared = Arc::new(v);
        // world 2 = p true, b false
        let val = Valuation::from_world(Arc::clone(&shared), 2);
        let f = Formula::and(Formula::atom("p"), Formula::not(Formula::atom("b")));
        assert_eq!(f.evaluate(&val), Ok(true));
        assert_eq!(Formula::Top.evaluate(&val), Ok(true));
        let g = Formula::implies(Formula::atom("p"), Formula::atom("b"));
        assert_eq!(g.evaluate(&val), Ok(false));
    }

    #[test]
    fn evaluate_reports_missing_atoms() {
        let v = Arc::new(vocab(&["p"]));
        let val = Valuation::from_world(v, 1);
        let f = Formula::atom("q");
        assert_eq!(f.evaluate(&val), Err(EvalError::MissingAtom("q".into())));
    }

    #[test]
    fn models_of_atom_and_constants() {
        let v = vocab(&["p", "q"]);
        let ms = models(&Formula::atom("p"), &v).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms.iter().all(|m| m.get("p") == Some(true)));

        assert!(models(&Formula::Bot, &v).unwrap().is_empty());

        let or = Formula::or(Formula::atom("p"), Formula::atom("q"));
        assert_eq!(models(&or, &v).unwrap().len(), 3);
    }

    #[test]
    fn models_respects_the_atom_cap() {
        let names: Vec<String> = (0..21).map(|i| format!("a{i}")).collect();
        let v = Vocabulary::from_atoms(&names).unwrap();
        assert!(matches!(
            model_worlds(&Formula::Top, &v),
            Err(EnumerationError::TooManyAtoms { atoms: 21, cap: 20 })
        ));
    }

    #[test]
    fn characteristic_formula_single_minterm() {
        let v = vocab(&["p", "q"]);
        // world 3 = p, q both true
        let f = characteristic_formula_of_worlds(&[3], &v);
        assert_eq!(f, Formula::and(Formula::atom("p"), Formula::atom("q")));
        assert_eq!(characteristic_formula_of_worlds(&[], &v), Formula::Bot);
    }

    #[test]
    fn characteristic_formula_matches_its_model_set() {
        let v = vocab(&["p", "q"]);
        // {pq, p~q} is logically p
        let f = characteristic_formula_of_worlds(&[3, 2], &v);
        assert_eq!(model_worlds(&f, &v).unwrap(), vec![2, 3]);
        let p = Formula::atom("p");
        assert_eq!(model_worlds(&f, &v).unwrap(), model_worlds(&p, &v).unwrap());
    }

    #[test]
    fn world_round_trip() {
        let v = Arc::new(vocab(&["a", "b", "c"]));
        for w in 0..8 {
            assert_eq!(Valuation::from_world(Arc::clone(&v), w).world(), w);
        }
    }

    #[test]
    fn display_uses_declared_precedence() {
        let f = Formula::implies(
            Formula::and(Formula::atom("p"), Formula::not(Formula::atom("b"))),
            Formula::atom("f"),
        );
        assert_eq!(f.to_string(), "p & ~b -> f");
        let g = Formula::implies(
            Formula::atom("p"),
            Formula::implies(Formula::atom("q"), Formula::atom("r")),
        );
        assert_eq!(g.to_string(), "p -> q -> r");
        let h = Formula::implies(
            Formula::implies(Formula::atom("p"), Formula::atom("q")),
            Formula::atom("r"),
        );
        assert_eq!(h.to_string(), "(p -> q) -> r");
        let n = Formula::not(Formula::and(Formula::atom("p"), Formula::atom("q")));
        assert_eq!(n.to_string(), "~(p & q)");
    }
}
