//! Swappable propositional entailment oracle.
//!
//! The truth-table backend is the reference; the search backend runs a
//! unit-propagating clause search (DPLL over a definitional CNF). Both must
//! agree on every query, which the test suite checks differentially.

use super::{Formula, Vocabulary, MAX_ENUM_ATOMS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    TruthTable,
    Search,
}

/// Decides classical entailment and satisfiability, counting every query.
///
/// The call counter lives in the handle rather than global state, so parallel
/// test runs do not interfere. A handle is single-owner mutable: move it
/// between threads freely, but do not share one across concurrent queries.
#[derive(Debug)]
pub struct EntailmentOracle {
    backend: Backend,
    calls: u64,
}

impl EntailmentOracle {
    pub fn new(backend: Backend) -> Self {
        EntailmentOracle { backend, calls: 0 }
    }

    pub fn truth_table() -> Self {
        Self::new(Backend::TruthTable)
    }

    pub fn search() -> Self {
        Self::new(Backend::Search)
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Number of `entails`/`is_satisfiable` queries answered so far.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// True iff every model of `premises` satisfies `conclusion`; with empty
    /// premises this is a tautology check. Counts as one query.
    pub fn entails(&mut self, premises: &[Formula], conclusion: &Formula) -> bool {
        self.calls += 1;
        let negated = Formula::not(conclusion.clone());
        let mut set: Vec<&Formula> = premises.iter().collect();
        set.push(&negated);
        !self.decide_sat(&set)
    }

    /// True iff the conjunction of `formulas` has a model. Counts as one query.
    pub fn is_satisfiable(&mut self, formulas: &[Formula]) -> bool {
        self.calls += 1;
        let set: Vec<&Formula> = formulas.iter().collect();
        self.decide_sat(&set)
    }

    fn decide_sat(&self, formulas: &[&Formula]) -> bool {
        match self.backend {
            Backend::TruthTable => truth_table_sat(formulas),
            Backend::Search => search_sat(formulas),
        }
    }
}

fn truth_table_sat(formulas: &[&Formula]) -> bool {
    let mut vocab = Vocabulary::new();
    for f in formulas {
        vocab.absorb(f);
    }
    assert!(
        vocab.len() <= MAX_ENUM_ATOMS,
        "truth-table query over {} atoms exceeds the cap of {MAX_ENUM_ATOMS}",
        vocab.len()
    );
    (0..vocab.world_count()).any(|w| {
        formulas
            .iter()
            .all(|f| f.evaluate_at(&vocab, w).expect("vocab absorbed all atoms"))
    })
}

// --- clause search backend ---------------------------------------------

/// Positive literal 2v, negative literal 2v+1.
type Lit = usize;

fn negate(l: Lit) -> Lit {
    l ^ 1
}

fn var(l: Lit) -> usize {
    l >> 1
}

enum Enc {
    Lit(Lit),
    Const(bool),
}

struct CnfBuilder {
    vocab: Vocabulary,
    next_var: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfBuilder {
    fn fresh(&mut self) -> Lit {
        let v = self.next_var;
        self.next_var += 1;
        v << 1
    }

    /// Definitional (Tseitin) encoding; returns the literal standing for `f`.
    fn encode(&mut self, f: &Formula) -> Enc {
        match f {
            Formula::Top => Enc::Const(true),
            Formula::Bot => Enc::Const(false),
            Formula::Atom(name) => {
                let v = self.vocab.index_of(name).expect("absorbed");
                Enc::Lit(v << 1)
            }
            Formula::Not(x) => match self.encode(x) {
                Enc::Const(b) => Enc::Const(!b),
                Enc::Lit(l) => Enc::Lit(negate(l)),
            },
            Formula::And(a, b) => {
                let (ea, eb) = (self.encode(a), self.encode(b));
                match (ea, eb) {
                    (Enc::Const(false), _) | (_, Enc::Const(false)) => Enc::Const(false),
                    (Enc::Const(true), e) | (e, Enc::Const(true)) => e,
                    (Enc::Lit(la), Enc::Lit(lb)) => {
                        let g = self.fresh();
                        // g <-> la & lb
                        self.clauses.push(vec![negate(g), la]);
                        self.clauses.push(vec![negate(g), lb]);
                        self.clauses.push(vec![g, negate(la), negate(lb)]);
                        Enc::Lit(g)
                    }
                }
            }
            Formula::Or(a, b) => {
                let (ea, eb) = (self.encode(a), self.encode(b));
                match (ea, eb) {
                    (Enc::Const(true), _) | (_, Enc::Const(true)) => Enc::Const(true),
                    (Enc::Const(false), e) | (e, Enc::Const(false)) => e,
                    (Enc::Lit(la), Enc::Lit(lb)) => {
                        let g = self.fresh();
                        // g <-> la | lb
                        self.clauses.push(vec![negate(g), la, lb]);
                        self.clauses.push(vec![g, negate(la)]);
                        self.clauses.push(vec![g, negate(lb)]);
                        Enc::Lit(g)
                    }
                }
            }
            Formula::Implies(a, b) => {
                self.encode(&Formula::or(Formula::not((**a).clone()), (**b).clone()))
            }
            Formula::Iff(a, b) => {
                let (ea, eb) = (self.encode(a), self.encode(b));
                match (ea, eb) {
                    (Enc::Const(x), Enc::Const(y)) => Enc::Const(x == y),
                    (Enc::Const(true), Enc::Lit(l)) | (Enc::Lit(l), Enc::Const(true)) => {
                        Enc::Lit(l)
                    }
                    (Enc::Const(false), Enc::Lit(l)) | (Enc::Lit(l), Enc::Const(false)) => {
                        Enc::Lit(negate(l))
                    }
                    (Enc::Lit(la), Enc::Lit(lb)) => {
                        let g = self.fresh();
                        // g <-> (la <-> lb)
                        self.clauses.push(vec![negate(g), negate(la), lb]);
                        self.clauses.push(vec![negate(g), la, negate(lb)]);
                        self.clauses.push(vec![g, la, lb]);
                        self.clauses.push(vec![g, negate(la), negate(lb)]);
                        Enc::Lit(g)
                    }
                }
            }
        }
    }
}

fn search_sat(formulas: &[&Formula]) -> bool {
    let mut vocab = Vocabulary::new();
    for f in formulas {
        vocab.absorb(f);
    }
    let mut builder = CnfBuilder {
        next_var: vocab.len(),
        vocab,
        clauses: Vec::new(),
    };
    for f in formulas {
        match builder.encode(f) {
            Enc::Const(false) => return false,
            Enc::Const(true) => {}
            Enc::Lit(l) => builder.clauses.push(vec![l]),
        }
    }
    let n = builder.next_var;
    dpll(&builder.clauses, vec![None; n])
}

fn dpll(clauses: &[Vec<Lit>], mut assignment: Vec<Option<bool>>) -> bool {
    // Unit propagation to fixpoint.
    loop {
        let mut propagated = false;
        for clause in clauses {
            let mut unassigned: Option<Lit> = None;
            let mut unassigned_count = 0;
            let mut satisfied = false;
            for &l in clause {
                match assignment[var(l)] {
                    Some(value) => {
                        if value == (l & 1 == 0) {
                            satisfied = true;
                            break;
                        }
                    }
                    None => {
                        unassigned_count += 1;
                        unassigned = Some(l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match unassigned_count {
                0 => return false, // conflict
                1 => {
                    let l = unassigned.unwrap();
                    assignment[var(l)] = Some(l & 1 == 0);
                    propagated = true;
                }
                _ => {}
            }
        }
        if !propagated {
            break;
        }
    }
    // Branch on the first unassigned variable.
    match assignment.iter().position(|a| a.is_none()) {
        None => true,
        Some(v) => {
            let mut left = assignment.clone();
            left[v] = Some(true);
            if dpll(clauses, left) {
                return true;
            }
            assignment[v] = Some(false);
            dpll(clauses, assignment)
        }
    }
}
