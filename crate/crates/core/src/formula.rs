//! Formula language for a multimodal logic of knowledge, belief and
//! intention, with derived secrecy operators.
//!
//! The primitive grammar is
//!
//! ```text
//! phi ::= p | ~phi | phi & phi | K[a] phi | B[a] phi | I[a] phi
//! ```
//!
//! `|`, `->`, `<->`, `true` and `false` are convenience connectives that
//! [`Formula::desugar`] rewrites into the primitive grammar:
//!
//! ```text
//! phi | psi   :=  ~(~phi & ~psi)
//! phi -> psi  :=  ~phi | psi
//! phi <-> psi :=  (phi -> psi) & (psi -> phi)
//! true        :=  __top | ~__top        (over the reserved variable __top)
//! false       :=  ~true
//! ```
//!
//! The derived secrecy operators expand as
//!
//! ```text
//! S[a,b] phi  :=  K[a] phi & (B[a] ~K[b] phi & I[a] (phi & ~K[b] phi))
//! T[b] phi    :=  phi & ~K[b] phi
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Variable reserved for the desugaring of `true`; rejected in user input.
pub const RESERVED_TOP_VAR: &str = "__top";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: String },
    #[error("formula is not in primitive form (contains {connective})")]
    NotDesugared { connective: &'static str },
}

fn check_token(token: &str) -> Result<(), FormulaError> {
    let err = |reason: &str| FormulaError::InvalidToken {
        token: token.to_owned(),
        reason: reason.to_owned(),
    };
    let mut chars = token.chars();
    match chars.next() {
        None => return Err(err("empty")),
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        Some(_) => return Err(err("must start with a letter or underscore")),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(err("allowed characters are letters, digits and underscore"));
    }
    if token == "true" || token == "false" {
        return Err(err("reserved keyword"));
    }
    Ok(())
}

macro_rules! token_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self, FormulaError> {
                let name = name.into();
                check_token(&name)?;
                Ok(Self(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::str::FromStr for $name {
            type Err = FormulaError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }
    };
}

token_newtype! {
    /// An agent name. Equality is by name; agent sets are always finite.
    AgentId
}
token_newtype! {
    /// A propositional variable name.
    VarName
}

/// The three primitive box modalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    K,
    B,
    I,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::K, Modality::B, Modality::I];

    pub fn letter(self) -> char {
        match self {
            Modality::K => 'K',
            Modality::B => 'B',
            Modality::I => 'I',
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// An immutable formula AST.
///
/// The derived order is the canonical structural order used everywhere a
/// reproducible iteration order is needed: case tag first (in declaration
/// order), then agent name, then operands recursively.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(VarName),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    K(AgentId, Box<Formula>),
    B(AgentId, Box<Formula>),
    I(AgentId, Box<Formula>),
}

/// A set of formulas iterated in the canonical structural order.
pub type FormulaSet = BTreeSet<Formula>;

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(VarName::new(name).expect("invalid variable name"))
    }

    #[allow(clippy::should_implement_trait)] // AST constructor, not negation of self
    pub fn not(phi: Formula) -> Formula {
        Formula::Not(Box::new(phi))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn k(agent: &AgentId, phi: Formula) -> Formula {
        Formula::K(agent.clone(), Box::new(phi))
    }

    pub fn b(agent: &AgentId, phi: Formula) -> Formula {
        Formula::B(agent.clone(), Box::new(phi))
    }

    pub fn i(agent: &AgentId, phi: Formula) -> Formula {
        Formula::I(agent.clone(), Box::new(phi))
    }

    pub fn modal(modality: Modality, agent: &AgentId, phi: Formula) -> Formula {
        match modality {
            Modality::K => Formula::k(agent, phi),
            Modality::B => Formula::b(agent, phi),
            Modality::I => Formula::i(agent, phi),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => 1,
            Formula::Not(a) | Formula::K(_, a) | Formula::B(_, a) | Formula::I(_, a) => {
                1 + a.size()
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Maximum nesting depth (a variable has depth 1).
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => 1,
            Formula::Not(a) | Formula::K(_, a) | Formula::B(_, a) | Formula::I(_, a) => {
                1 + a.depth()
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// True when the formula only uses the primitive grammar
    /// (variables, `~`, `&` and the three modalities).
    pub fn is_primitive(&self) -> bool {
        match self {
            Formula::Var(_) => true,
            Formula::Top | Formula::Bot => false,
            Formula::Not(a) | Formula::K(_, a) | Formula::B(_, a) | Formula::I(_, a) => {
                a.is_primitive()
            }
            Formula::And(a, b) => a.is_primitive() && b.is_primitive(),
            Formula::Or(_, _) | Formula::Implies(_, _) | Formula::Iff(_, _) => false,
        }
    }

    fn sugar_name(&self) -> Option<&'static str> {
        match self {
            Formula::Top => Some("true"),
            Formula::Bot => Some("false"),
            Formula::Or(_, _) => Some("|"),
            Formula::Implies(_, _) => Some("->"),
            Formula::Iff(_, _) => Some("<->"),
            _ => None,
        }
    }

    fn first_sugar(&self) -> Option<&'static str> {
        if let Some(name) = self.sugar_name() {
            return Some(name);
        }
        match self {
            Formula::Not(a) | Formula::K(_, a) | Formula::B(_, a) | Formula::I(_, a) => {
                a.first_sugar()
            }
            Formula::And(a, b) => a.first_sugar().or_else(|| b.first_sugar()),
            _ => None,
        }
    }

    /// Errors unless the formula is in primitive form.
    pub fn require_primitive(&self) -> Result<(), FormulaError> {
        match self.first_sugar() {
            None => Ok(()),
            Some(connective) => Err(FormulaError::NotDesugared { connective }),
        }
    }

    /// Rewrites every derived connective into the primitive grammar.
    ///
    /// Idempotent, and preserves the truth value at every world of every
    /// model.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Var(v) => Formula::Var(v.clone()),
            Formula::Top => {
                let v = Formula::Var(VarName(RESERVED_TOP_VAR.to_owned()));
                Formula::or(v.clone(), Formula::not(v)).desugar()
            }
            Formula::Bot => Formula::not(Formula::Top.desugar()),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => {
                // phi | psi := ~(~phi & ~psi)
                Formula::not(Formula::and(
                    Formula::not(a.desugar()),
                    Formula::not(b.desugar()),
                ))
            }
            Formula::Implies(a, b) => {
                // phi -> psi := ~phi | psi
                Formula::or(Formula::not(a.as_ref().clone()), b.as_ref().clone()).desugar()
            }
            Formula::Iff(a, b) => Formula::and(
                Formula::implies(a.as_ref().clone(), b.as_ref().clone()).desugar(),
                Formula::implies(b.as_ref().clone(), a.as_ref().clone()).desugar(),
            ),
            Formula::K(ag, a) => Formula::K(ag.clone(), Box::new(a.desugar())),
            Formula::B(ag, a) => Formula::B(ag.clone(), Box::new(a.desugar())),
            Formula::I(ag, a) => Formula::I(ag.clone(), Box::new(a.desugar())),
        }
    }

    /// All agents occurring in the formula.
    pub fn agents(&self) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<AgentId>) {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => {}
            Formula::Not(a) => a.collect_agents(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_agents(out);
                b.collect_agents(out);
            }
            Formula::K(ag, a) | Formula::B(ag, a) | Formula::I(ag, a) => {
                out.insert(ag.clone());
                a.collect_agents(out);
            }
        }
    }

    /// All propositional variables occurring in the formula.
    pub fn variables(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VarName>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Top | Formula::Bot => {}
            Formula::Not(a) | Formula::K(_, a) | Formula::B(_, a) | Formula::I(_, a) => {
                a.collect_vars(out)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// `S[a,b] phi`: agent `a` intends to keep the true secret `phi` from `b`.
///
/// Expands to `K[a] phi & (B[a] ~K[b] phi & I[a] (phi & ~K[b] phi))`,
/// right-associated. `a = b` is allowed; the result is then unsatisfiable.
pub fn expand_secret(keeper: &AgentId, nescient: &AgentId, phi: Formula) -> Formula {
    let ignorance = Formula::not(Formula::k(nescient, phi.clone()));
    Formula::and(
        Formula::k(keeper, phi.clone()),
        Formula::and(
            Formula::b(keeper, ignorance.clone()),
            Formula::i(keeper, Formula::and(phi, ignorance)),
        ),
    )
}

/// `T[b] phi`: factive ignorance, `phi & ~K[b] phi`.
pub fn expand_factive_ignorance(nescient: &AgentId, phi: Formula) -> Formula {
    Formula::and(phi.clone(), Formula::not(Formula::k(nescient, phi)))
}

/// `n`-fold application of a box: zero iterations return `phi` unchanged.
pub fn iterate_box(modality: Modality, agent: &AgentId, n: usize, phi: Formula) -> Formula {
    let mut out = phi;
    for _ in 0..n {
        out = Formula::modal(modality, agent, out);
    }
    out
}

/// The set of all subformulas of a primitive-form formula, including the
/// formula itself.
///
/// Rejects formulas that still contain derived connectives; desugar first.
pub fn subformulas(phi: &Formula) -> Result<FormulaSet, FormulaError> {
    phi.require_primitive()?;
    let mut out = FormulaSet::new();
    collect_subformulas(phi, &mut out);
    Ok(out)
}

fn collect_subformulas(phi: &Formula, out: &mut FormulaSet) {
    if !out.insert(phi.clone()) {
        return;
    }
    match phi {
        Formula::Var(_) | Formula::Top | Formula::Bot => {}
        Formula::Not(a) | Formula::K(_, a) | Formula::B(_, a) | Formula::I(_, a) => {
            collect_subformulas(a, out)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_subformulas(a, out);
            collect_subformulas(b, out);
        }
    }
}

/// The translation that equips every intention box with an inner knowledge
/// box: `I[a] psi` becomes `I[a] K[a] t(psi)`, all other constructors map
/// homomorphically.
///
/// Truth in a model is invariant under the translation. The translation is
/// not idempotent; apply it exactly once.
pub fn translate_t(phi: &Formula) -> Formula {
    match phi {
        Formula::Var(v) => Formula::Var(v.clone()),
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::Not(a) => Formula::not(translate_t(a)),
        Formula::And(a, b) => Formula::and(translate_t(a), translate_t(b)),
        Formula::Or(a, b) => Formula::or(translate_t(a), translate_t(b)),
        Formula::Implies(a, b) => Formula::implies(translate_t(a), translate_t(b)),
        Formula::Iff(a, b) => Formula::iff(translate_t(a), translate_t(b)),
        Formula::K(ag, a) => Formula::K(ag.clone(), Box::new(translate_t(a))),
        Formula::B(ag, a) => Formula::B(ag.clone(), Box::new(translate_t(a))),
        Formula::I(ag, a) => Formula::i(ag, Formula::k(ag, translate_t(a))),
    }
}
