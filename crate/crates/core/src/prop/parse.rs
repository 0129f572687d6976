//! Lexer and recursive-descent parser for the formula surface syntax.
//!
//! Precedence, tightest first: `~`, `&`, `|`, `->` (right-associative),
//! `<->`. `true` and `false` are the constants. The token `|~` never occurs
//! inside a formula; it is lexed as a single token so conditional statements
//! can be split around it by the knowledge-base parser.

use super::{is_valid_atom_name, Formula, Vocabulary};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown atom `{name}` at byte {offset}")]
    UnknownAtom { name: String, offset: usize },
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    /// The conditional separator `|~`.
    Turnstile,
    LBracket,
    RBracket,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '~' => {
                out.push((Token::Not, i));
                i += 1;
            }
            '&' => {
                out.push((Token::And, i));
                i += 1;
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'~') {
                    out.push((Token::Turnstile, i));
                    i += 2;
                } else {
                    out.push((Token::Or, i));
                    i += 1;
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((Token::Implies, i));
                    i += 2;
                } else {
                    return Err(syntax(i, "expected `->`"));
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    out.push((Token::Iff, i));
                    i += 3;
                } else {
                    return Err(syntax(i, "expected `<->`"));
                }
            }
            '(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            '[' => {
                out.push((Token::LBracket, i));
                i += 1;
            }
            ']' => {
                out.push((Token::RBracket, i));
                i += 1;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                out.push((
                    match word {
                        "true" => Token::True,
                        "false" => Token::False,
                        _ => {
                            debug_assert!(is_valid_atom_name(word));
                            Token::Ident(word.to_string())
                        }
                    },
                    start,
                ));
            }
            _ => return Err(syntax(i, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// Where atom names come from while parsing.
pub(crate) enum VocabMode<'a> {
    /// Unseen atoms extend the vocabulary.
    Collect(&'a mut Vocabulary),
    /// Unseen atoms are errors.
    Strict(&'a Vocabulary),
}

impl VocabMode<'_> {
    fn admit(&mut self, name: &str, offset: usize) -> Result<(), ParseError> {
        match self {
            VocabMode::Collect(v) => {
                v.add(name);
                Ok(())
            }
            VocabMode::Strict(v) => {
                if v.contains(name) {
                    Ok(())
                } else {
                    Err(ParseError::UnknownAtom {
                        name: name.to_string(),
                        offset,
                    })
                }
            }
        }
    }
}

struct Parser<'t, 'v> {
    tokens: &'t [(Token, usize)],
    pos: usize,
    end_offset: usize,
    vocab: VocabMode<'v>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t);
        self.pos += 1;
        t
    }

    fn parse_iff(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_implies()?;
        if self.peek() == Some(&Token::Iff) {
            self.bump();
            let rhs = self.parse_iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Token::Implies) {
            self.bump();
            let rhs = self.parse_implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Token::Or) {
            self.bump();
            let rhs = self.parse_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_unary()?;
        while self.peek() == Some(&Token::And) {
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        let offset = self.here();
        match self.bump() {
            Some(Token::Not) => Ok(Formula::not(self.parse_unary()?)),
            Some(Token::True) => Ok(Formula::Top),
            Some(Token::False) => Ok(Formula::Bot),
            Some(Token::Ident(name)) => {
                let name = name.clone();
                self.vocab.admit(&name, offset)?;
                Ok(Formula::Atom(name))
            }
            Some(Token::LParen) => {
                let inner = self.parse_iff()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(syntax(self.prev_offset(), "expected `)`")),
                }
            }
            Some(_) => Err(syntax(offset, "expected a formula")),
            None => Err(syntax(offset, "unexpected end of input")),
        }
    }

    fn prev_offset(&self) -> usize {
        self.tokens
            .get(self.pos.saturating_sub(1))
            .map(|(_, o)| *o)
            .unwrap_or(self.end_offset)
    }
}

/// Parses a full token slice as one formula, requiring every token consumed.
pub(crate) fn parse_tokens(
    tokens: &[(Token, usize)],
    end_offset: usize,
    vocab: VocabMode<'_>,
) -> Result<Formula, ParseError> {
    let mut p = Parser {
        tokens,
        pos: 0,
        end_offset,
        vocab,
    };
    let f = p.parse_iff()?;
    if p.pos < tokens.len() {
        return Err(syntax(p.here(), "unexpected trailing input"));
    }
    Ok(f)
}

/// Parses `text`, extending `vocab` with any unseen atoms.
pub fn parse_formula(text: &str, vocab: &mut Vocabulary) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    parse_tokens(&tokens, text.len(), VocabMode::Collect(vocab))
}

/// Parses `text`; atoms outside `vocab` are errors.
pub fn parse_formula_strict(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    parse_tokens(&tokens, text.len(), VocabMode::Strict(vocab))
}
