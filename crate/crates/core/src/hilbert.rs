//! Axiom-scheme recognition and Hilbert-style proof checking.
//!
//! The axiom schemes, for every agent `a` and box `*` in `{K,B,I}`:
//!
//! ```text
//! A1   all tautologies of classical propositional logic
//! A2   *(phi -> psi) -> (*phi -> *psi)
//! A3   K[a] phi -> phi
//! A4   K[a] phi -> K[a] K[a] phi
//! A5   B[a] phi -> ~B[a] ~phi
//! A6   K[a] phi -> B[a] phi
//! A7   B[a] phi -> K[a] B[a] phi
//! A8   I[a] phi -> ~I[a] ~phi
//! A9   I[a] phi -> K[a] I[a] phi
//! A10  I[a] phi -> I[a] K[a] phi
//! A11  I[a] phi -> I[a] I[a] phi
//! ```
//!
//! Rules: modus ponens, and necessitation for each box. Necessitation only
//! applies to theorems: a line whose derivation touches a premise cannot be
//! necessitated.
//!
//! All checks run on desugared formulas; implications are recognized through
//! their desugared shape `~(~~A & ~B)`, so schemes match the way they read.

use serde::Deserialize;
use thiserror::Error;

use crate::formula::{AgentId, Formula, Modality};
use crate::parser::{parse_formula, ParseError};

/// Names of the axiom schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomName {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
}

impl AxiomName {
    pub const ALL: [AxiomName; 11] = [
        AxiomName::A1,
        AxiomName::A2,
        AxiomName::A3,
        AxiomName::A4,
        AxiomName::A5,
        AxiomName::A6,
        AxiomName::A7,
        AxiomName::A8,
        AxiomName::A9,
        AxiomName::A10,
        AxiomName::A11,
    ];
}

impl std::fmt::Display for AxiomName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "A{}", *self as u8 + 1)
    }
}

impl std::str::FromStr for AxiomName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n: usize = s
            .strip_prefix('A')
            .and_then(|rest| rest.parse().ok())
            .ok_or_else(|| format!("unknown axiom name {s:?}"))?;
        AxiomName::ALL
            .get(n.wrapping_sub(1))
            .copied()
            .ok_or_else(|| format!("unknown axiom name {s:?}"))
    }
}

/// How a proof line is justified. Line references are 1-based and must point
/// strictly backwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Premise,
    Axiom(AxiomName),
    ModusPonens(usize, usize),
    Necessitation(Modality, AgentId, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

/// A numbered list of lines; the last line is the conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// The declared premise set: formulas of the premise-justified lines.
    pub fn premises(&self) -> Vec<&Formula> {
        self.lines
            .iter()
            .filter(|l| l.justification == Justification::Premise)
            .map(|l| &l.formula)
            .collect()
    }

    /// Whether no line is a premise.
    pub fn is_premise_free(&self) -> bool {
        self.premises().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { line: usize, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

#[derive(Debug, Error)]
pub enum ProofError {
    #[error(
        "truth table over {atoms} atoms exceeds the cap of {}",
        MAX_TAUTOLOGY_ATOMS
    )]
    AtomCapExceeded { atoms: usize },
    #[error("formula is not in primitive form")]
    NotDesugared,
    #[error("bad proof file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {error}")]
    BadFormula { line: usize, error: ParseError },
    #[error("line {line}: {message}")]
    BadJustification { line: usize, message: String },
}

/// Truth-table cap: formulas with more opaque atoms than this are refused.
pub const MAX_TAUTOLOGY_ATOMS: usize = 20;

fn collect_atoms<'a>(phi: &'a Formula, out: &mut Vec<&'a Formula>) -> Result<(), ProofError> {
    match phi {
        // Variables and maximal boxed subformulas are the opaque atoms.
        Formula::Var(_) | Formula::K(_, _) | Formula::B(_, _) | Formula::I(_, _) => {
            if !out.contains(&phi) {
                out.push(phi);
            }
            Ok(())
        }
        Formula::Not(a) => collect_atoms(a, out),
        Formula::And(a, b) => {
            collect_atoms(a, out)?;
            collect_atoms(b, out)
        }
        Formula::Top
        | Formula::Bot
        | Formula::Or(_, _)
        | Formula::Implies(_, _)
        | Formula::Iff(_, _) => Err(ProofError::NotDesugared),
    }
}

fn eval_boolean(phi: &Formula, atoms: &[&Formula], assignment: u32) -> bool {
    match phi {
        Formula::Var(_) | Formula::K(_, _) | Formula::B(_, _) | Formula::I(_, _) => {
            let index = atoms
                .iter()
                .position(|a| *a == phi)
                .expect("atom collected");
            assignment >> index & 1 == 1
        }
        Formula::Not(a) => !eval_boolean(a, atoms, assignment),
        Formula::And(a, b) => {
            eval_boolean(a, atoms, assignment) && eval_boolean(b, atoms, assignment)
        }
        _ => unreachable!("rejected by collect_atoms"),
    }
}

/// Decides propositional tautologyhood of a desugared formula by truth
/// table, treating each maximal boxed subformula as an opaque atom.
pub fn is_tautology(phi: &Formula) -> Result<bool, ProofError> {
    let mut atoms = Vec::new();
    collect_atoms(phi, &mut atoms)?;
    if atoms.len() > MAX_TAUTOLOGY_ATOMS {
        return Err(ProofError::AtomCapExceeded { atoms: atoms.len() });
    }
    for assignment in 0..1u32 << atoms.len() {
        if !eval_boolean(phi, &atoms, assignment) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Splits a desugared implication `~(~~A & ~B)` into `(A, B)`.
fn as_implication(phi: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::Not(inner) = phi else {
        return None;
    };
    let Formula::And(l, r) = inner.as_ref() else {
        return None;
    };
    let (Formula::Not(ll), Formula::Not(rhs)) = (l.as_ref(), r.as_ref()) else {
        return None;
    };
    let Formula::Not(lhs) = ll.as_ref() else {
        return None;
    };
    Some((lhs, rhs))
}

fn as_box(phi: &Formula) -> Option<(Modality, &AgentId, &Formula)> {
    match phi {
        Formula::K(a, body) => Some((Modality::K, a, body)),
        Formula::B(a, body) => Some((Modality::B, a, body)),
        Formula::I(a, body) => Some((Modality::I, a, body)),
        _ => None,
    }
}

/// True iff the desugared formula instantiates the named scheme for some
/// substitution and agent. `A2` requires a single box and a single agent
/// across all three occurrences.
pub fn match_axiom(phi: &Formula, name: AxiomName) -> bool {
    use Modality::{B, I, K};
    if name == AxiomName::A1 {
        return is_tautology(phi).unwrap_or(false);
    }
    let Some((lhs, rhs)) = as_implication(phi) else {
        return false;
    };
    match name {
        AxiomName::A1 => unreachable!(),
        AxiomName::A2 => {
            let Some((star, agent, body)) = as_box(lhs) else {
                return false;
            };
            let Some((inner_lhs, inner_rhs)) = as_implication(body) else {
                return false;
            };
            let Some((outer_l, outer_r)) = as_implication(rhs) else {
                return false;
            };
            as_box(outer_l) == Some((star, agent, inner_lhs))
                && as_box(outer_r) == Some((star, agent, inner_rhs))
        }
        AxiomName::A3 => matches!(as_box(lhs), Some((K, _, body)) if body == rhs),
        AxiomName::A4 => {
            let Some((K, agent, _)) = as_box(lhs) else {
                return false;
            };
            as_box(rhs) == Some((K, agent, lhs))
        }
        AxiomName::A5 | AxiomName::A8 => {
            let star = if name == AxiomName::A5 { B } else { I };
            let Some((s, agent, body)) = as_box(lhs) else {
                return false;
            };
            if s != star {
                return false;
            }
            let Formula::Not(negated_box) = rhs else {
                return false;
            };
            match as_box(negated_box) {
                Some((s2, agent2, Formula::Not(negated_body))) => {
                    s2 == star && agent2 == agent && negated_body.as_ref() == body
                }
                _ => false,
            }
        }
        AxiomName::A6 => {
            let (Some((K, agent, body)), Some((B, agent2, body2))) = (as_box(lhs), as_box(rhs))
            else {
                return false;
            };
            agent == agent2 && body == body2
        }
        AxiomName::A7 => {
            let Some((B, agent, _)) = as_box(lhs) else {
                return false;
            };
            as_box(rhs) == Some((K, agent, lhs))
        }
        AxiomName::A9 => {
            let Some((I, agent, _)) = as_box(lhs) else {
                return false;
            };
            as_box(rhs) == Some((K, agent, lhs))
        }
        AxiomName::A10 => {
            let Some((I, agent, body)) = as_box(lhs) else {
                return false;
            };
            match as_box(rhs) {
                Some((I, agent2, inner)) if agent2 == agent => {
                    as_box(inner) == Some((K, agent, body))
                }
                _ => false,
            }
        }
        AxiomName::A11 => {
            let Some((I, agent, _)) = as_box(lhs) else {
                return false;
            };
            as_box(rhs) == Some((I, agent, lhs))
        }
    }
}

/// Verifies a proof line by line.
///
/// Every line must be a premise, an instance of a named axiom, an
/// application of modus ponens to two earlier lines, or necessitation of an
/// earlier premise-free line. Returns the first failing line and the reason.
pub fn check_proof(proof: &Proof) -> Result<Verdict, ProofError> {
    if proof.lines.is_empty() {
        return Ok(Verdict::Rejected {
            line: 0,
            reason: "proof has no lines".to_owned(),
        });
    }
    let desugared: Vec<Formula> = proof.lines.iter().map(|l| l.formula.desugar()).collect();
    // tainted[i] = the derivation of line i uses a premise somewhere.
    let mut tainted: Vec<bool> = vec![false; proof.lines.len()];

    for (index, line) in proof.lines.iter().enumerate() {
        let number = index + 1;
        let reject = |reason: String| {
            Ok(Verdict::Rejected {
                line: number,
                reason,
            })
        };
        let resolve = |reference: usize| -> Result<usize, String> {
            if reference == 0 || reference > index {
                Err(format!(
                    "reference {reference} must point to an earlier line (1..{index})"
                ))
            } else {
                Ok(reference - 1)
            }
        };
        match &line.justification {
            Justification::Premise => tainted[index] = true,
            Justification::Axiom(AxiomName::A1) => match is_tautology(&desugared[index]) {
                Ok(true) => {}
                Ok(false) => return reject("not a propositional tautology".to_owned()),
                Err(e) => return Err(e),
            },
            Justification::Axiom(name) => {
                if !match_axiom(&desugared[index], *name) {
                    return reject(format!("not an instance of {name}"));
                }
            }
            Justification::ModusPonens(from, implication) => {
                let (from, implication) = match (resolve(*from), resolve(*implication)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(e), _) | (_, Err(e)) => return reject(e),
                };
                match as_implication(&desugared[implication]) {
                    Some((lhs, rhs)) if lhs == &desugared[from] && rhs == &desugared[index] => {}
                    Some(_) => {
                        return reject(format!(
                            "line {} is not `line {} -> this line`",
                            implication + 1,
                            from + 1
                        ))
                    }
                    None => {
                        return reject(format!("line {} is not an implication", implication + 1))
                    }
                }
                tainted[index] = tainted[from] || tainted[implication];
            }
            Justification::Necessitation(modality, agent, from) => {
                let from = match resolve(*from) {
                    Ok(i) => i,
                    Err(e) => return reject(e),
                };
                if tainted[from] {
                    return reject("necessitation over premise".to_owned());
                }
                let want = Formula::modal(*modality, agent, desugared[from].clone());
                if desugared[index] != want {
                    return reject(format!(
                        "line is not {}[{agent}] applied to line {}",
                        modality,
                        from + 1
                    ));
                }
            }
        }
    }
    Ok(Verdict::Accepted)
}

// ---------------------------------------------------------------------------
// JSON proof files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProofLineFile {
    formula: String,
    by: JustificationFile,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JustificationFile {
    Name(String),
    ModusPonens { mp: (usize, usize) },
    Necessitation { rn: NecessitationFile },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NecessitationFile {
    #[serde(rename = "mod")]
    modality: String,
    agent: String,
    from: usize,
}

/// Parses the JSON proof format: an array of `{"formula", "by"}` objects
/// where `by` is `"premise"`, an axiom name, `{"mp":[i,j]}`, or
/// `{"rn":{"mod","agent","from"}}`, with 1-based line indices.
pub fn proof_from_json_str(text: &str) -> Result<Proof, ProofError> {
    let lines: Vec<ProofLineFile> = serde_json::from_str(text)?;
    let mut out = Vec::with_capacity(lines.len());
    for (index, line) in lines.into_iter().enumerate() {
        let number = index + 1;
        let formula = parse_formula(&line.formula).map_err(|error| ProofError::BadFormula {
            line: number,
            error,
        })?;
        let bad = |message: String| ProofError::BadJustification {
            line: number,
            message,
        };
        let justification = match line.by {
            JustificationFile::Name(name) if name == "premise" => Justification::Premise,
            JustificationFile::Name(name) => {
                Justification::Axiom(name.parse::<AxiomName>().map_err(bad)?)
            }
            JustificationFile::ModusPonens { mp } => Justification::ModusPonens(mp.0, mp.1),
            JustificationFile::Necessitation { rn } => {
                let modality = match rn.modality.as_str() {
                    "K" => Modality::K,
                    "B" => Modality::B,
                    "I" => Modality::I,
                    other => return Err(bad(format!("unknown modality {other:?}"))),
                };
                let agent = AgentId::new(rn.agent).map_err(|e| bad(e.to_string()))?;
                Justification::Necessitation(modality, agent, rn.from)
            }
        };
        out.push(ProofLine {
            formula,
            justification,
        });
    }
    Ok(Proof { lines: out })
}
