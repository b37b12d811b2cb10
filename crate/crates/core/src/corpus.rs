//! Executable catalogue of the theory's propositions.
//!
//! Each entry claims a formula valid or invalid. Invalid entries usually
//! carry a witness model file plus the world refuting the formula; the
//! runner re-checks the witness from scratch (frame conditions, then
//! evaluation). Entries without a witness hand the formula to the bounded
//! search, which must find one. Valid entries must survive the bounded
//! search without a counter-model.
//!
//! Entries are JSON files. A claim looks like
//!
//! ```json
//! {
//!   "id": "propertiessab.3",
//!   "claim": {"kind": "valid", "formula": "S[a,b] p -> p"},
//!   "schema_note": "phi := p",
//!   "citation": "Proposition 4(3)"
//! }
//! ```
//!
//! with optional `witness` (path of a model file) and `world` fields inside
//! `claim` for invalid entries.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::decision::{find_countermodel, SearchConfig, SearchError, SearchOutcome};
use crate::formula::Formula;
use crate::kripke::{KripkeModel, ModelError};
use crate::parser::{parse_formula, ParseError};

mod data;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("bad corpus entry: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate entry id {0}")]
    DuplicateId(String),
    #[error("entry {id}: bad formula: {error}")]
    BadFormula { id: String, error: ParseError },
    #[error("entry {id}: witness world missing")]
    MissingWorld { id: String },
    #[error("witness model {path}: {error}")]
    BadModel { path: String, error: ModelError },
    #[error("entry {id} references unknown witness {path}")]
    UnknownWitness { id: String, path: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// What an entry asserts about its formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    Valid {
        formula: String,
    },
    Invalid {
        formula: String,
        /// Relative path of the witness model, when one is recorded.
        witness: Option<String>,
        /// The world at which the witness refutes the formula.
        world: Option<String>,
    },
}

impl Claim {
    pub fn formula_text(&self) -> &str {
        match self {
            Claim::Valid { formula } | Claim::Invalid { formula, .. } => formula,
        }
    }

    pub fn is_valid_claim(&self) -> bool {
        matches!(self, Claim::Valid { .. })
    }
}

/// One catalogued claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub claim: Claim,
    /// How the schematic statement was instantiated, and any transcription
    /// annotations.
    pub schema_note: String,
    /// Where the claim comes from: proposition number and item.
    pub citation: String,
}

impl CorpusEntry {
    pub fn formula(&self) -> Result<Formula, ParseError> {
        parse_formula(self.claim.formula_text())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClaimFile {
    kind: String,
    formula: String,
    #[serde(default)]
    witness: Option<String>,
    #[serde(default)]
    world: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    id: String,
    claim: ClaimFile,
    schema_note: String,
    citation: String,
}

fn parse_entry(text: &str) -> Result<CorpusEntry, CorpusError> {
    let file: EntryFile = serde_json::from_str(text)?;
    let claim = match file.claim.kind.as_str() {
        "valid" => Claim::Valid {
            formula: file.claim.formula,
        },
        "invalid" => Claim::Invalid {
            formula: file.claim.formula,
            witness: file.claim.witness,
            world: file.claim.world,
        },
        other => {
            return Err(CorpusError::Json(serde::de::Error::custom(format!(
                "unknown claim kind {other:?}"
            ))))
        }
    };
    // The formula must parse now, not at run time.
    parse_formula(claim.formula_text()).map_err(|error| CorpusError::BadFormula {
        id: file.id.clone(),
        error,
    })?;
    Ok(CorpusEntry {
        id: file.id,
        claim,
        schema_note: file.schema_note,
        citation: file.citation,
    })
}

/// A loaded corpus: entries plus their witness models.
#[derive(Debug, Clone)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
    models: BTreeMap<String, KripkeModel>,
}

impl Corpus {
    /// The catalogue bundled with the crate.
    pub fn builtin() -> Corpus {
        let mut entries = Vec::new();
        for text in data::ENTRIES {
            entries.push(parse_entry(text).expect("bundled entry parses"));
        }
        let mut models = BTreeMap::new();
        for (path, text) in data::MODELS {
            let model = KripkeModel::from_json_str(text).expect("bundled model parses");
            models.insert((*path).to_owned(), model);
        }
        Corpus::assemble(entries, models).expect("bundled corpus is consistent")
    }

    /// Loads `entries/*.json` and `models/*.json` from a directory tree.
    pub fn from_dir(root: &Path) -> Result<Corpus, CorpusError> {
        let mut entries = Vec::new();
        let mut paths: Vec<_> =
            std::fs::read_dir(root.join("entries"))?.collect::<Result<Vec<_>, _>>()?;
        paths.sort_by_key(|e| e.path());
        for dir_entry in paths {
            let text = std::fs::read_to_string(dir_entry.path())?;
            entries.push(parse_entry(&text)?);
        }
        let mut models = BTreeMap::new();
        let mut paths: Vec<_> =
            std::fs::read_dir(root.join("models"))?.collect::<Result<Vec<_>, _>>()?;
        paths.sort_by_key(|e| e.path());
        for dir_entry in paths {
            let path = dir_entry.path();
            let text = std::fs::read_to_string(&path)?;
            let model =
                KripkeModel::from_json_str(&text).map_err(|error| CorpusError::BadModel {
                    path: path.display().to_string(),
                    error,
                })?;
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            models.insert(format!("models/{name}"), model);
        }
        Corpus::assemble(entries, models)
    }

    fn assemble(
        entries: Vec<CorpusEntry>,
        models: BTreeMap<String, KripkeModel>,
    ) -> Result<Corpus, CorpusError> {
        let mut sorted = entries;
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in sorted.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(CorpusError::DuplicateId(pair[0].id.clone()));
            }
        }
        for entry in &sorted {
            if let Claim::Invalid {
                witness: Some(path),
                world,
                ..
            } = &entry.claim
            {
                if !models.contains_key(path) {
                    return Err(CorpusError::UnknownWitness {
                        id: entry.id.clone(),
                        path: path.clone(),
                    });
                }
                if world.is_none() {
                    return Err(CorpusError::MissingWorld {
                        id: entry.id.clone(),
                    });
                }
            }
        }
        Ok(Corpus {
            entries: sorted,
            models,
        })
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn model(&self, path: &str) -> Option<&KripkeModel> {
        self.models.get(path)
    }

    /// Entries whose id matches the pattern (`*` is the only wildcard;
    /// everything else is literal). No pattern selects everything.
    pub fn list(&self, filter: Option<&str>) -> Vec<&CorpusEntry> {
        self.entries
            .iter()
            .filter(|e| filter.is_none_or(|pattern| glob_match(pattern, &e.id)))
            .collect()
    }

    /// Checks every selected entry and reports per-entry outcomes, ordered
    /// by id. Failures are report lines, never panics.
    pub fn run(&self, filter: Option<&str>, cfg: &SearchConfig) -> CorpusReport {
        let mut reports = Vec::new();
        for entry in self.list(filter) {
            reports.push(self.run_entry(entry, cfg));
        }
        CorpusReport { entries: reports }
    }

    fn run_entry(&self, entry: &CorpusEntry, cfg: &SearchConfig) -> EntryReport {
        let fail = |detail: String| EntryReport {
            id: entry.id.clone(),
            passed: false,
            detail,
        };
        let pass = |detail: String| EntryReport {
            id: entry.id.clone(),
            passed: true,
            detail,
        };
        let formula = match entry.formula() {
            Ok(f) => f.desugar(),
            Err(e) => return fail(format!("formula does not parse: {e}")),
        };
        match &entry.claim {
            Claim::Valid { .. } => match find_countermodel(&formula, cfg) {
                Ok(SearchOutcome::ValidUpTo(n)) => pass(format!("consistent up to {n} worlds")),
                Ok(SearchOutcome::Valid { certified_bound }) => {
                    pass(format!("certified at bound {certified_bound}"))
                }
                Ok(SearchOutcome::Invalid { model, world }) => fail(format!(
                    "refuted at world {world} of\n{}",
                    model.to_json_string()
                )),
                Ok(SearchOutcome::Timeout { explored_worlds }) => fail(format!(
                    "budget exhausted after {explored_worlds} world tiers"
                )),
                Err(e) => fail(format!("search failed: {e}")),
            },
            Claim::Invalid {
                witness: Some(path),
                world,
                ..
            } => {
                let Some(model) = self.models.get(path) else {
                    return fail(format!("witness {path} not loaded"));
                };
                let world_name = world.as_deref().unwrap_or_default();
                let Some(world) = model.world(world_name) else {
                    return fail(format!("witness world {world_name} not declared"));
                };
                let frame = model.check_frame();
                if !frame.all_passed() {
                    let broken: Vec<String> = frame
                        .conditions
                        .iter()
                        .filter(|c| !c.passed())
                        .map(|c| c.condition.to_string())
                        .collect();
                    return fail(format!("witness fails {}", broken.join("; ")));
                }
                match model.eval(world, &formula) {
                    Ok(false) => pass(format!("witness refutes at {world_name}")),
                    Ok(true) => fail(format!("witness does not refute at {world_name}")),
                    Err(e) => fail(format!("witness evaluation failed: {e}")),
                }
            }
            Claim::Invalid { witness: None, .. } => match find_countermodel(&formula, cfg) {
                Ok(SearchOutcome::Invalid { model, .. }) => pass(format!(
                    "search found a {}-world counter-model",
                    model.worlds().len()
                )),
                Ok(SearchOutcome::ValidUpTo(n)) => {
                    fail(format!("no counter-model up to {n} worlds"))
                }
                Ok(SearchOutcome::Valid { certified_bound }) => fail(format!(
                    "formula is actually valid (certified at bound {certified_bound})"
                )),
                Ok(SearchOutcome::Timeout { explored_worlds }) => fail(format!(
                    "budget exhausted after {explored_worlds} world tiers"
                )),
                Err(e) => fail(format!("search failed: {e}")),
            },
        }
    }
}

/// Outcome for one entry.
#[derive(Debug, Clone)]
pub struct EntryReport {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for EntryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} — {}", self.id, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub entries: Vec<EntryReport>,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EntryReport> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

/// Literal matching with `*` as the only wildcard.
fn glob_match(pattern: &str, text: &str) -> bool {
    fn matches(pattern: &[u8], text: &[u8]) -> bool {
        match pattern.split_first() {
            None => text.is_empty(),
            Some((b'*', rest)) => (0..=text.len()).any(|skip| matches(rest, &text[skip..])),
            Some((c, rest)) => match text.split_first() {
                Some((t, text_rest)) if t == c => matches(rest, text_rest),
                _ => false,
            },
        }
    }
    matches(pattern.as_bytes(), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob_is_literal_except_star() {
        assert!(glob_match("propertiessab.*", "propertiessab.3"));
        assert!(!glob_match("propertiessab.*", "propertiessab2.1"));
        assert!(glob_match("*", "anything"));
        assert!(glob_match("a*c", "abc"));
        assert!(glob_match("a*c", "ac"));
        assert!(!glob_match("a*c", "acx"));
        assert!(!glob_match("abc", "abd"));
    }

    #[test]
    fn entry_files_parse_and_validate() {
        let entry = parse_entry(
            r#"{
                "id": "x.1",
                "claim": {"kind": "valid", "formula": "S[a,b] p -> p"},
                "schema_note": "phi := p",
                "citation": "Proposition 4(3)"
            }"#,
        )
        .unwrap();
        assert_eq!(entry.id, "x.1");
        assert!(entry.claim.is_valid_claim());

        assert!(parse_entry(r#"{"id": "x", "claim": {"kind": "valid", "formula": "p &"}, "schema_note": "", "citation": "c"}"#).is_err());
        assert!(parse_entry(r#"{"id": "x", "claim": {"kind": "odd", "formula": "p"}, "schema_note": "", "citation": "c"}"#).is_err());
        assert!(parse_entry(r#"{"id": "x", "claim": {"kind": "valid", "formula": "p"}, "schema_note": "", "citation": "c", "extra": 1}"#).is_err());
    }

    #[test]
    fn searchable_invalid_entry_runs_without_witness() {
        let entry = parse_entry(
            r#"{
                "id": "synthetic.1",
                "claim": {"kind": "invalid", "formula": "I[a] p -> K[a] p"},
                "schema_note": "synthetic",
                "citation": "none"
            }"#,
        )
        .unwrap();
        let corpus = Corpus::assemble(vec![entry], BTreeMap::new()).unwrap();
        let report = corpus.run(None, &SearchConfig::new(2));
        assert!(report.all_passed(), "{:?}", report.entries);
        assert!(report.entries[0].detail.contains("counter-model"));
    }

    #[test]
    fn witness_entries_must_reference_loaded_models() {
        let entry = parse_entry(
            r#"{
                "id": "broken.1",
                "claim": {"kind": "invalid", "formula": "p", "witness": "models/ghost.json", "world": "i"},
                "schema_note": "",
                "citation": "none"
            }"#,
        )
        .unwrap();
        assert!(matches!(
            Corpus::assemble(vec![entry], BTreeMap::new()),
            Err(CorpusError::UnknownWitness { .. })
        ));
    }
}
