//! Command-line front end: consistency checks, closure queries, formula
//! ranks, model dumps, and batch processing.
//!
//! Exit codes: 0 true/consistent, 1 false/inconsistent, 2 parse or read
//! error, 3 oracle mismatch, 4 refused budget, 5 partial batch failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use situated_core::brute::{brute_minimal_epistemic_model, EnumerationBudget};
use situated_core::closure::{compute_ranking, formula_rank_with, minimal_closure, CompiledKb};
use situated_core::kb::{conjunctive_form, parse_query, Sckb, SituatedConditional};
use situated_core::prop::{parse_formula, Backend, EntailmentOracle, Vocabulary};
use situated_core::semantics::{minimal_epistemic_model, SemanticsError};

const EXIT_FALSE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_REFUSED: u8 = 4;
const EXIT_PARTIAL: u8 = 5;

#[derive(Parser)]
#[command(
    name = "situated",
    about = "Reasoner for situated conditional knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Engine {
    /// Truth-table entailment (reference).
    #[default]
    Tt,
    /// Unit-propagating clause search.
    Search,
}

impl From<Engine> for Backend {
    fn from(e: Engine) -> Backend {
        match e {
            Engine::Tt => Backend::TruthTable,
            Engine::Search => Backend::Search,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a knowledge base is consistent.
    Check { kb: PathBuf },
    /// Decide whether a query is in the minimal closure of the KB.
    Query {
        kb: PathBuf,
        /// `A |~ B` or `A |~[G] B`
        query: String,
        #[arg(long, value_enum, default_value_t = Engine::Tt)]
        engine: Engine,
        /// Cross-check the verdict against the brute-force semantic oracle
        /// (vocabularies of at most two atoms).
        #[arg(long)]
        oracle: bool,
        /// Report the number of entailment checks performed.
        #[arg(long)]
        stats: bool,
        /// Emit the result as a JSON object.
        #[arg(long)]
        json: bool,
    },
    /// Print the rank of a formula with respect to the KB.
    Rank {
        kb: PathBuf,
        formula: String,
        #[arg(long, value_enum, default_value_t = Engine::Tt)]
        engine: Engine,
    },
    /// Print the minimal epistemic model, one layer per line, highest first.
    Model {
        kb: PathBuf,
        /// Refuse vocabularies larger than this.
        #[arg(long, default_value_t = 12)]
        max_atoms: usize,
        #[arg(long, value_enum, default_value_t = Engine::Tt)]
        engine: Engine,
    },
    /// Run a file of queries against one compiled KB.
    Batch {
        kb: PathBuf,
        queries: PathBuf,
        /// Emit a JSON array instead of one line per query.
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value_t = Engine::Tt)]
        engine: Engine,
    },
}

#[derive(Serialize)]
struct QueryResult {
    query: String,
    verdict: bool,
    calls: u64,
    ms: f64,
}

fn load_kb(path: &Path) -> Result<Sckb, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Sckb::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { kb } => cmd_check(&kb),
        Command::Query {
            kb,
            query,
            engine,
            oracle,
            stats,
            json,
        } => cmd_query(&kb, &query, engine, oracle, stats, json),
        Command::Rank {
            kb,
            formula,
            engine,
        } => cmd_rank(&kb, &formula, engine),
        Command::Model {
            kb,
            max_atoms,
            engine,
        } => cmd_model(&kb, max_atoms, engine),
        Command::Batch {
            kb,
            queries,
            json,
            engine,
        } => cmd_batch(&kb, &queries, json, engine),
    }
}

fn parse_failure(message: String) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_PARSE)
}

fn cmd_check(path: &Path) -> ExitCode {
    let kb = match load_kb(path) {
        Ok(kb) => kb,
        Err(e) => return parse_failure(e),
    };
    let mut oracle = EntailmentOracle::truth_table();
    if situated_core::closure::is_consistent(&mut oracle, &kb) {
        println!("consistent");
        ExitCode::SUCCESS
    } else {
        println!("inconsistent");
        ExitCode::from(EXIT_FALSE)
    }
}

fn cmd_query(
    path: &Path,
    query_text: &str,
    engine: Engine,
    oracle_check: bool,
    stats: bool,
    json: bool,
) -> ExitCode {
    let kb = match load_kb(path) {
        Ok(kb) => kb,
        Err(e) => return parse_failure(e),
    };
    let mut vocab = kb.vocab().clone();
    let query = match parse_query(query_text, &mut vocab) {
        Ok(q) => q,
        Err(e) => return parse_failure(format!("query: {e}")),
    };
    let mut oracle = EntailmentOracle::new(engine.into());
    let start = Instant::now();
    let verdict = minimal_closure(&mut oracle, &kb, &query);
    let result = QueryResult {
        query: query.to_string(),
        verdict,
        calls: oracle.calls(),
        ms: start.elapsed().as_secs_f64() * 1e3,
    };
    if json {
        println!("{}", serde_json::to_string(&result).expect("serializable"));
    } else {
        println!("{verdict}");
        if stats {
            println!("entailment-calls: {}", result.calls);
        }
    }
    if oracle_check {
        match semantic_verdict(&kb, &query, &vocab) {
            Some(semantic) if semantic != verdict => {
                eprintln!(
                    "oracle mismatch: algorithm says {verdict}, semantic oracle says {semantic}"
                );
                return ExitCode::from(EXIT_MISMATCH);
            }
            Some(_) => eprintln!("oracle-check: ok"),
            None => eprintln!("oracle-check: skipped (needs 1-2 atoms)"),
        }
    }
    if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}

/// Situated satisfaction in the enumerated minimal model, when the combined
/// vocabulary is small enough to enumerate.
fn semantic_verdict(kb: &Sckb, query: &SituatedConditional, vocab: &Vocabulary) -> Option<bool> {
    if vocab.is_empty() || vocab.len() > 2 {
        return None;
    }
    let kb = Sckb::new(kb.conditionals().to_vec(), vocab.clone());
    let model = brute_minimal_epistemic_model(&kb, vocab, &EnumerationBudget::default()).ok()?;
    Some(model.satisfies(query))
}

fn cmd_rank(path: &Path, formula_text: &str, engine: Engine) -> ExitCode {
    let kb = match load_kb(path) {
        Ok(kb) => kb,
        Err(e) => return parse_failure(e),
    };
    let mut vocab = kb.vocab().clone();
    let formula = match parse_formula(formula_text, &mut vocab) {
        Ok(f) => f,
        Err(e) => return parse_failure(format!("formula: {e}")),
    };
    let mut oracle = EntailmentOracle::new(engine.into());
    let ranking = compute_ranking(&mut oracle, &conjunctive_form(&kb));
    println!("{}", formula_rank_with(&mut oracle, &ranking, &formula));
    ExitCode::SUCCESS
}

fn cmd_model(path: &Path, max_atoms: usize, engine: Engine) -> ExitCode {
    let kb = match load_kb(path) {
        Ok(kb) => kb,
        Err(e) => return parse_failure(e),
    };
    let atoms = kb.vocab().len();
    if atoms == 0 || atoms > max_atoms {
        eprintln!(
            "refusing to build a model over {atoms} atoms (limit {max_atoms}); \
             use --max-atoms or an `atoms:` header"
        );
        return ExitCode::from(EXIT_REFUSED);
    }
    let mut oracle = EntailmentOracle::new(engine.into());
    match minimal_epistemic_model(&mut oracle, &kb) {
        Ok(model) => {
            println!("{model}");
            ExitCode::SUCCESS
        }
        Err(SemanticsError::InconsistentKb) => {
            eprintln!("inconsistent");
            ExitCode::from(EXIT_FALSE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_REFUSED)
        }
    }
}

fn cmd_batch(kb_path: &Path, queries_path: &Path, json: bool, engine: Engine) -> ExitCode {
    let kb = match load_kb(kb_path) {
        Ok(kb) => kb,
        Err(e) => return parse_failure(e),
    };
    let text = match std::fs::read_to_string(queries_path) {
        Ok(t) => t,
        Err(e) => return parse_failure(format!("cannot read {}: {e}", queries_path.display())),
    };
    let mut compile_oracle = EntailmentOracle::new(engine.into());
    let compiled = CompiledKb::new(&mut compile_oracle, kb.clone());

    let mut entries: Vec<serde_json::Value> = Vec::new();
    let mut lines: Vec<String> = Vec::new();
    let mut any_error = false;
    for raw in text.lines() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut vocab = kb.vocab().clone();
        match parse_query(line, &mut vocab) {
            Ok(query) => {
                let mut oracle = EntailmentOracle::new(engine.into());
                let start = Instant::now();
                let verdict = compiled.query(&mut oracle, &query);
                let result = QueryResult {
                    query: query.to_string(),
                    verdict,
                    calls: oracle.calls(),
                    ms: start.elapsed().as_secs_f64() * 1e3,
                };
                if json {
                    entries.push(serde_json::to_value(&result).expect("serializable"));
                } else {
                    lines.push(format!(
                        "{}\tcalls={}\tms={:.3}\t{}",
                        result.verdict, result.calls, result.ms, result.query
                    ));
                }
            }
            Err(e) => {
                any_error = true;
                if json {
                    entries.push(serde_json::json!({ "query": line, "error": e.to_string() }));
                } else {
                    lines.push(format!("error\t{line}\t{e}"));
                }
            }
        }
    }
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&entries).expect("serializable")
        );
    } else {
        for line in lines {
            println!("{line}");
        }
    }
    if any_error {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    }
}
