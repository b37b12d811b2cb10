//! Bounded counter-model search and the decision procedure.
//!
//! [`find_countermodel`] looks for an admissible model falsifying a formula,
//! growing the world count one tier at a time. Within a tier the search
//! assigns valuation and relation bits guided by a three-valued partial
//! evaluation of the formula at the candidate falsifying world, while frame
//! conditions propagate eagerly and prune inconsistent branches.
//!
//! [`decide`] turns the search into a complete procedure: the filtration
//! argument bounds the size of a minimal counter-model by two to the number
//! of subformulas of the translated formula (negations collapse into their
//! bodies, since a class is determined by the truth of the unnegated
//! members), so exhausting every tier up to that bound certifies validity.

mod filtration;
mod search;

use std::collections::BTreeSet;
use std::time::Duration;

use thiserror::Error;

pub use filtration::{filtrate, verify_filtration, FiltrationReport, FiltrationResult};

use crate::formula::{subformulas, translate_t, AgentId, Formula, FormulaError};
use crate::kripke::{KripkeModel, ModelError, WorldId};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("formula must be desugared first: {0}")]
    NotDesugared(#[from] FormulaError),
    #[error("search agents must include every agent of the formula (missing {0})")]
    MissingAgent(String),
    #[error("max_worlds must be at least 1")]
    ZeroWorldBound,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Knobs for [`find_countermodel`].
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Largest world count to try.
    pub max_worlds: usize,
    /// Agent universe of candidate models. Empty means the default: the
    /// agents of the formula plus one fresh agent.
    pub agents: BTreeSet<AgentId>,
    /// Wall-clock budget; exceeding it yields [`SearchOutcome::Timeout`].
    pub time_budget: Duration,
    /// Certification mode: cap the tier range at the finite-model-property
    /// bound, since no counter-model can first appear past it.
    pub exhaustive: bool,
}

impl SearchConfig {
    pub fn new(max_worlds: usize) -> Self {
        SearchConfig {
            max_worlds,
            agents: BTreeSet::new(),
            time_budget: Duration::from_secs(30),
            exhaustive: false,
        }
    }

    pub fn with_agents(mut self, agents: BTreeSet<AgentId>) -> Self {
        self.agents = agents;
        self
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.time_budget = budget;
        self
    }

    pub fn exhaustive(mut self) -> Self {
        self.exhaustive = true;
        self
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig::new(4)
    }
}

/// Result of a bounded search.
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    /// A counter-model: an admissible model whose named world falsifies the
    /// formula. Verified before being returned.
    Invalid { model: KripkeModel, world: WorldId },
    /// No counter-model with up to this many worlds; nothing is claimed
    /// beyond the explored tiers.
    ValidUpTo(usize),
    /// Every tier up to the finite-model-property bound was exhausted, so
    /// the formula is valid outright.
    Valid { certified_bound: u64 },
    /// The time budget ran out; only tiers up to `explored_worlds` finished.
    Timeout { explored_worlds: usize },
}

impl SearchOutcome {
    pub fn is_invalid(&self) -> bool {
        matches!(self, SearchOutcome::Invalid { .. })
    }
}

/// Upper bound on the size of a minimal counter-model: two to the number of
/// negation-collapsed subformulas of the translated formula. Saturates at
/// `u64::MAX`.
pub fn fmp_bound(phi: &Formula) -> Result<u64, SearchError> {
    phi.require_primitive()?;
    let theta = subformulas(&translate_t(phi))?;
    let mut collapsed: BTreeSet<&Formula> = BTreeSet::new();
    for mut member in theta.iter() {
        while let Formula::Not(inner) = member {
            member = inner;
        }
        collapsed.insert(member);
    }
    Ok(1u64.checked_shl(collapsed.len() as u32).unwrap_or(u64::MAX))
}

fn fresh_agent(used: &BTreeSet<AgentId>) -> AgentId {
    for letter in 'a'..='z' {
        let candidate = AgentId::new(letter.to_string()).unwrap();
        if !used.contains(&candidate) {
            return candidate;
        }
    }
    (0..)
        .map(|i| AgentId::new(format!("x{i}")).unwrap())
        .find(|candidate| !used.contains(candidate))
        .unwrap()
}

/// Searches for a counter-model of a desugared formula.
///
/// Tiers run in ascending world count; the first tier with a hit returns its
/// first counter-model under the canonical assignment order, so results are
/// reproducible. Every returned model is re-validated: it must pass the
/// frame check and falsify the formula at the reported world.
pub fn find_countermodel(phi: &Formula, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    phi.require_primitive()?;
    if cfg.max_worlds == 0 {
        return Err(SearchError::ZeroWorldBound);
    }
    let formula_agents = phi.agents();
    let agents = if cfg.agents.is_empty() {
        let mut agents = formula_agents.clone();
        agents.insert(fresh_agent(&agents));
        agents
    } else {
        for agent in &formula_agents {
            if !cfg.agents.contains(agent) {
                return Err(SearchError::MissingAgent(agent.as_str().to_owned()));
            }
        }
        cfg.agents.clone()
    };

    let bound = fmp_bound(phi)?;
    let max_worlds = if cfg.exhaustive {
        usize::try_from(bound).map_or(cfg.max_worlds, |b| cfg.max_worlds.min(b))
    } else {
        cfg.max_worlds
    };

    let deadline = std::time::Instant::now() + cfg.time_budget;
    let engine = search::Engine::new(phi, &agents);
    for n in 1..=max_worlds {
        if std::time::Instant::now() >= deadline {
            return Ok(SearchOutcome::Timeout {
                explored_worlds: n - 1,
            });
        }
        match engine.run_tier(n, deadline) {
            search::TierOutcome::Exhausted => continue,
            search::TierOutcome::TimedOut => {
                return Ok(SearchOutcome::Timeout {
                    explored_worlds: n - 1,
                });
            }
            search::TierOutcome::Found(candidate) => {
                let world = candidate
                    .world(search::falsifying_world_name(n).as_str())
                    .expect("search names its worlds")
                    .clone();
                // Never trust the search: the witness must survive the
                // independent frame check and evaluator.
                assert!(
                    candidate.check_frame().all_passed(),
                    "search returned an inadmissible model"
                );
                assert!(
                    !candidate.eval(&world, phi)?,
                    "search returned a non-refuting model"
                );
                return Ok(SearchOutcome::Invalid {
                    model: candidate,
                    world,
                });
            }
        }
    }

    // Exhausting every tier at or past the finite-model bound is a
    // certificate whether or not it was asked for.
    if (max_worlds as u64) >= bound {
        Ok(SearchOutcome::Valid {
            certified_bound: bound,
        })
    } else {
        Ok(SearchOutcome::ValidUpTo(max_worlds))
    }
}

/// The complete decision procedure: exhaust every world count up to the
/// finite-model-property bound. `Invalid` refutes the formula, `Valid`
/// certifies it, and running out of budget is reported as `Timeout`, never
/// as a verdict.
pub fn decide(phi: &Formula, budget: Duration) -> Result<SearchOutcome, SearchError> {
    let bound = fmp_bound(phi)?;
    let cfg = SearchConfig::new(usize::try_from(bound).unwrap_or(usize::MAX))
        .with_budget(budget)
        .exhaustive();
    find_countermodel(phi, &cfg)
}
