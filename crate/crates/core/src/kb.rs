//! Conditional knowledge bases and the derived forms the algorithms consume.
//!
//! A knowledge-base file holds one statement per line. `#` starts a comment
//! and blank lines are skipped. Accepted statement forms:
//!
//! - `A |~ B` — conditional with the trivial situation,
//! - `A |~[G] B` — conditional in situation `G`,
//! - `A` — a bare formula, shorthand for `~A |~ false` (A holds in every
//!   plausible world).
//!
//! An optional leading header `atoms: p q r` pins the vocabulary and makes
//! atom handling strict; otherwise atoms are collected in appearance order.

use std::fmt;

use crate::prop::{
    parse_tokens, tokenize, Formula, ParseError, Token, VocabError, VocabMode, Vocabulary,
};
use thiserror::Error;

/// A statement "if `antecedent`, normally `consequent`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefeasibleConditional {
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl DefeasibleConditional {
    pub fn new(antecedent: Formula, consequent: Formula) -> Self {
        DefeasibleConditional {
            antecedent,
            consequent,
        }
    }
}

impl fmt::Display for DefeasibleConditional {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} |~ {}", self.antecedent, self.consequent)
    }
}

/// A statement "given the situation `situation`, if `antecedent`, normally
/// `consequent`".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SituatedConditional {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub situation: Formula,
}

impl SituatedConditional {
    pub fn new(antecedent: Formula, consequent: Formula, situation: Formula) -> Self {
        SituatedConditional {
            antecedent,
            consequent,
            situation,
        }
    }

    /// The conditional with the trivial situation.
    pub fn plain(antecedent: Formula, consequent: Formula) -> Self {
        Self::new(antecedent, consequent, Formula::Top)
    }

    /// Folds the situation into the antecedent: `A |~[G] B` becomes
    /// `A & G |~ B`. No simplification is applied.
    pub fn conjunctive(&self) -> DefeasibleConditional {
        DefeasibleConditional::new(
            Formula::and(self.antecedent.clone(), self.situation.clone()),
            self.consequent.clone(),
        )
    }
}

impl fmt::Display for SituatedConditional {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.situation == Formula::Top {
            write!(out, "{} |~ {}", self.antecedent, self.consequent)
        } else {
            write!(
                out,
                "{} |~[{}] {}",
                self.antecedent, self.situation, self.consequent
            )
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KbError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: more than one `|~` in a statement")]
    MultipleConditionals { line: usize },
    #[error("line {line}: malformed situation brackets")]
    MalformedSituation { line: usize },
    #[error("line {line}: {source}")]
    Header {
        line: usize,
        #[source]
        source: VocabError,
    },
}

/// An ordered situated conditional knowledge base.
///
/// Structural duplicates are dropped at construction, keeping the first
/// occurrence. Immutable afterwards; freely shareable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sckb {
    conditionals: Vec<SituatedConditional>,
    vocab: Vocabulary,
}

impl Sckb {
    /// Builds a KB over `vocab`, extending it with any atoms the
    /// conditionals mention that it does not yet cover.
    pub fn new(conditionals: Vec<SituatedConditional>, mut vocab: Vocabulary) -> Self {
        let mut seen: Vec<SituatedConditional> = Vec::new();
        for c in conditionals {
            if !seen.contains(&c) {
                vocab.absorb(&c.antecedent);
                vocab.absorb(&c.consequent);
                vocab.absorb(&c.situation);
                seen.push(c);
            }
        }
        Sckb {
            conditionals: seen,
            vocab,
        }
    }

    pub fn parse(text: &str) -> Result<Sckb, KbError> {
        let mut vocab = Vocabulary::new();
        let mut strict = false;
        let mut conditionals = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if conditionals.is_empty() && !strict && line.starts_with("atoms:") {
                let names = line["atoms:".len()..].split_whitespace();
                vocab = Vocabulary::from_atoms(names).map_err(|source| KbError::Header {
                    line: line_no,
                    source,
                })?;
                strict = true;
                continue;
            }
            let c = parse_statement(line, line_no, &mut vocab, strict)?;
            if !conditionals.contains(&c) {
                conditionals.push(c);
            }
        }
        Ok(Sckb {
            conditionals,
            vocab,
        })
    }

    pub fn conditionals(&self) -> &[SituatedConditional] {
        &self.conditionals
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.conditionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditionals.is_empty()
    }

    /// Canonical text form: an `atoms:` header followed by one conditional
    /// per line, with trivial situations elided. Parsing the output yields a
    /// structurally equal KB.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.vocab.is_empty() {
            out.push_str("atoms:");
            for a in self.vocab.atoms() {
                out.push(' ');
                out.push_str(a);
            }
            out.push('\n');
        }
        for c in &self.conditionals {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }
}

fn parse_segment(
    tokens: &[(Token, usize)],
    line_len: usize,
    line_no: usize,
    vocab: &mut Vocabulary,
    strict: bool,
) -> Result<Formula, KbError> {
    let mode = if strict {
        VocabMode::Strict(vocab)
    } else {
        VocabMode::Collect(vocab)
    };
    parse_tokens(tokens, line_len, mode).map_err(|source| KbError::Parse {
        line: line_no,
        source,
    })
}

fn parse_statement(
    line: &str,
    line_no: usize,
    vocab: &mut Vocabulary,
    strict: bool,
) -> Result<SituatedConditional, KbError> {
    let tokens = tokenize(line).map_err(|source| KbError::Parse {
        line: line_no,
        source,
    })?;
    let separators: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, (t, _))| *t == Token::Turnstile)
        .map(|(i, _)| i)
        .collect();
    match separators.as_slice() {
        [] => {
            let f = parse_segment(&tokens, line.len(), line_no, vocab, strict)?;
            Ok(SituatedConditional::plain(Formula::not(f), Formula::Bot))
        }
        [sep] => {
            let antecedent = parse_segment(&tokens[..*sep], line.len(), line_no, vocab, strict)?;
            let mut rest = &tokens[sep + 1..];
            let mut situation = Formula::Top;
            if rest.first().map(|(t, _)| t) == Some(&Token::LBracket) {
                let close = rest
                    .iter()
                    .position(|(t, _)| *t == Token::RBracket)
                    .ok_or(KbError::MalformedSituation { line: line_no })?;
                situation = parse_segment(&rest[1..close], line.len(), line_no, vocab, strict)?;
                rest = &rest[close + 1..];
            }
            let consequent = parse_segment(rest, line.len(), line_no, vocab, strict)?;
            Ok(SituatedConditional::new(antecedent, consequent, situation))
        }
        _ => Err(KbError::MultipleConditionals { line: line_no }),
    }
}

/// Parses a query of the form `A |~ B` or `A |~[G] B`, collecting unseen
/// atoms into `vocab`. Bare formulas are not queries.
pub fn parse_query(text: &str, vocab: &mut Vocabulary) -> Result<SituatedConditional, KbError> {
    let tokens = tokenize(text).map_err(|source| KbError::Parse { line: 1, source })?;
    if !tokens.iter().any(|(t, _)| *t == Token::Turnstile) {
        return Err(KbError::Parse {
            line: 1,
            source: ParseError::Syntax {
                offset: text.len(),
                message: "a query must contain `|~`".into(),
            },
        });
    }
    parse_statement(text, 1, vocab, false)
}

/// The conjunctive classical form: element `i` is `A_i & G_i |~ B_i`, order
/// preserved, antecedents left unsimplified.
pub fn conjunctive_form(kb: &Sckb) -> Vec<DefeasibleConditional> {
    kb.conditionals().iter().map(|c| c.conjunctive()).collect()
}

/// The material implications `A -> B` of the given conditionals.
pub fn materialise(conditionals: &[DefeasibleConditional]) -> Vec<Formula> {
    conditionals
        .iter()
        .map(|c| Formula::implies(c.antecedent.clone(), c.consequent.clone()))
        .collect()
}

/// Conjunction of the negated antecedents of `fixpoint`, in order; the empty
/// conjunction is `true`. Over the fixpoint stratum of a ranking this
/// characterises the plausible worlds of the minimal ranked model.
pub fn plausible_region_formula(fixpoint: &[DefeasibleConditional]) -> Formula {
    Formula::conjoin(fixpoint.iter().map(|c| Formula::not(c.antecedent.clone())))
}

/// The knowledge bases derived from an [`Sckb`] for query answering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedKbs {
    /// Conjunctive classical form of the whole KB.
    pub conjunctive: Vec<DefeasibleConditional>,
    /// Conditionals whose situation only holds in implausible worlds.
    pub counterfactual: Vec<SituatedConditional>,
    /// Conjunctive forms of `counterfactual` plus the guard that rules the
    /// plausible region out; ranks the implausible-but-possible worlds.
    pub shifted: Vec<DefeasibleConditional>,
    /// Formula characterising the plausible region.
    pub plausible_region: Formula,
}
