//! Toolkit for a normal multimodal logic of secrecy intentions over
//! knowledge (`K`), belief (`B`) and intention (`I`) boxes, with the derived
//! operator `S[a,b] phi` — agent `a` intends to keep the true secret `phi`
//! from agent `b` — and factive ignorance `T[b] phi`.
//!
//! The crate provides, in order of dependency:
//!
//! - [`formula`]: the formula language, desugaring, subformula closure and
//!   the intention-to-knowledge translation;
//! - [`parser`]: an ASCII concrete syntax with a round-tripping printer;
//! - [`kripke`]: finite models, frame-condition validation and evaluation;
//! - [`hilbert`]: axiom-scheme recognition and Hilbert proof checking;
//! - [`decision`]: bounded counter-model search, the filtration quotient and
//!   a complete decision procedure from the finite model property;
//! - [`corpus`]: an executable catalogue of the theory's propositions with
//!   transcribed or search-derived witness models.

pub mod corpus;
pub mod decision;
pub mod formula;
pub mod hilbert;
pub mod kripke;
pub mod parser;

pub use formula::{
    expand_factive_ignorance, expand_secret, iterate_box, subformulas, translate_t, AgentId,
    Formula, FormulaSet, Modality, VarName,
};
pub use kripke::{FrameReport, KripkeModel, WorldId};
pub use parser::{parse_formula, print_formula, ParseError};
