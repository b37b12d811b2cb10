//! Finite Kripke models with three agent-indexed accessibility relations.
//!
//! A frame is admissible (an "S-frame") when, for every agent `a`:
//!
//! 2. the belief relation `B_a` is serial;
//! 3. the intention relation `I_a` is serial and transitive;
//! 4. the knowledge relation `K_a` is reflexive and transitive;
//! 5. `K_a(i,j)` and `I_a(j,w)` imply `I_a(i,w)`;
//! 6. `B_a` is contained in `K_a`;
//! 7. `K_a(i,j)` and `B_a(j,w)` imply `B_a(i,w)`;
//! 8. `I_a(i,j)` and `K_a(j,w)` imply `I_a(i,w)`.
//!
//! (Condition 1 — a nonempty world set — is enforced at construction.)
//! Truth is the usual box semantics: `K[a] phi` holds at `i` iff `phi`
//! holds at every `K_a`-successor of `i`, and likewise for `B` and `I`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{AgentId, Formula, FormulaError, Modality, VarName};

/// A world name. Unique within a model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId(String);

impl WorldId {
    pub fn new(name: impl Into<String>) -> Result<Self, FormulaError> {
        let name = name.into();
        // Same token shape as agent and variable names.
        AgentId::new(name.clone())?;
        Ok(WorldId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for WorldId {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

/// A binary relation on worlds, stored as a sorted pair set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relation(BTreeSet<(WorldId, WorldId)>);

impl Relation {
    pub fn new() -> Self {
        Relation(BTreeSet::new())
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (WorldId, WorldId)>,
    {
        Relation(pairs.into_iter().collect())
    }

    /// The identity relation on the given worlds.
    pub fn diagonal<'a, I>(worlds: I) -> Self
    where
        I: IntoIterator<Item = &'a WorldId>,
    {
        Relation(worlds.into_iter().map(|w| (w.clone(), w.clone())).collect())
    }

    pub fn insert(&mut self, from: WorldId, to: WorldId) -> bool {
        self.0.insert((from, to))
    }

    pub fn remove(&mut self, from: &WorldId, to: &WorldId) -> bool {
        self.0.remove(&(from.clone(), to.clone()))
    }

    pub fn contains(&self, from: &WorldId, to: &WorldId) -> bool {
        self.0.contains(&(from.clone(), to.clone()))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation(self.0.union(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(WorldId, WorldId)> {
        self.0.iter()
    }

    /// Successors of `from`, in canonical order.
    pub fn successors<'a>(&'a self, from: &'a WorldId) -> impl Iterator<Item = &'a WorldId> {
        self.0
            .range((from.clone(), WorldId(String::new()))..)
            .take_while(move |(f, _)| f == from)
            .map(|(_, t)| t)
    }
}

/// The frame laws checked by [`KripkeModel::check_frame`], numbered 2-8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FrameCondition {
    BeliefSerial,
    IntentionSerialTransitive,
    KnowledgeReflexiveTransitive,
    KnowledgeIntentionCompose,
    BeliefWithinKnowledge,
    KnowledgeBeliefCompose,
    IntentionKnowledgeCompose,
}

impl FrameCondition {
    pub const ALL: [FrameCondition; 7] = [
        FrameCondition::BeliefSerial,
        FrameCondition::IntentionSerialTransitive,
        FrameCondition::KnowledgeReflexiveTransitive,
        FrameCondition::KnowledgeIntentionCompose,
        FrameCondition::BeliefWithinKnowledge,
        FrameCondition::KnowledgeBeliefCompose,
        FrameCondition::IntentionKnowledgeCompose,
    ];

    pub fn number(self) -> u8 {
        match self {
            FrameCondition::BeliefSerial => 2,
            FrameCondition::IntentionSerialTransitive => 3,
            FrameCondition::KnowledgeReflexiveTransitive => 4,
            FrameCondition::KnowledgeIntentionCompose => 5,
            FrameCondition::BeliefWithinKnowledge => 6,
            FrameCondition::KnowledgeBeliefCompose => 7,
            FrameCondition::IntentionKnowledgeCompose => 8,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            FrameCondition::BeliefSerial => "B is serial",
            FrameCondition::IntentionSerialTransitive => "I is serial and transitive",
            FrameCondition::KnowledgeReflexiveTransitive => "K is reflexive and transitive",
            FrameCondition::KnowledgeIntentionCompose => "K(i,j) and I(j,w) imply I(i,w)",
            FrameCondition::BeliefWithinKnowledge => "B is contained in K",
            FrameCondition::KnowledgeBeliefCompose => "K(i,j) and B(j,w) imply B(i,w)",
            FrameCondition::IntentionKnowledgeCompose => "I(i,j) and K(j,w) imply I(i,w)",
        }
    }
}

impl fmt::Display for FrameCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} ({})", self.number(), self.describe())
    }
}

/// One witnessed violation of a frame condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameViolation {
    pub agent: AgentId,
    /// The worlds witnessing the failure: one for a missing successor or
    /// self-loop, two for a pair outside a containment, three for a failed
    /// composition or transitivity step.
    pub worlds: Vec<WorldId>,
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let worlds: Vec<&str> = self.worlds.iter().map(|w| w.as_str()).collect();
        write!(f, "agent {}: ({})", self.agent, worlds.join(","))
    }
}

/// Verdict for a single frame condition, with every witnessing violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub condition: FrameCondition,
    pub violations: Vec<FrameViolation>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-condition verdicts for a model; the frame is admissible iff all pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameReport {
    pub conditions: Vec<ConditionReport>,
}

impl FrameReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(ConditionReport::passed)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model has no worlds")]
    EmptyWorlds,
    #[error("model has no agents")]
    EmptyAgents,
    #[error("duplicate world {0}")]
    DuplicateWorld(String),
    #[error("relation for agent {agent} mentions undeclared world {world}")]
    UndeclaredRelationWorld { agent: String, world: String },
    #[error("relations declared for unknown agent {0}")]
    UndeclaredRelationAgent(String),
    #[error("valuation of {var} mentions undeclared world {world}")]
    UndeclaredValuationWorld { var: String, world: String },
    #[error("unknown world {0}")]
    UnknownWorld(String),
    #[error("formula mentions agent {0} not declared in the model")]
    UnknownAgent(String),
    #[error("model violates the frame conditions; use the unchecked evaluator for diagnostics")]
    NotAdmissible,
    #[error(transparent)]
    BadToken(#[from] FormulaError),
    #[error("bad model file: {0}")]
    Json(#[from] serde_json::Error),
}

/// The three relations one agent contributes to a model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgentRelations {
    pub knowledge: Relation,
    pub belief: Relation,
    pub intention: Relation,
}

impl AgentRelations {
    pub fn get(&self, modality: Modality) -> &Relation {
        match modality {
            Modality::K => &self.knowledge,
            Modality::B => &self.belief,
            Modality::I => &self.intention,
        }
    }

    pub fn get_mut(&mut self, modality: Modality) -> &mut Relation {
        match modality {
            Modality::K => &mut self.knowledge,
            Modality::B => &mut self.belief,
            Modality::I => &mut self.intention,
        }
    }
}

/// An immutable finite model: worlds, agents, relations and a valuation.
///
/// Construction validates structure only (declared worlds and agents);
/// whether the frame conditions hold is computed once and cached, and
/// gates [`KripkeModel::eval`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<WorldId>,
    agents: BTreeSet<AgentId>,
    relations: BTreeMap<AgentId, AgentRelations>,
    valuation: BTreeMap<VarName, BTreeSet<WorldId>>,
    admissible: bool,
}

impl KripkeModel {
    pub fn new(
        worlds: Vec<WorldId>,
        agents: BTreeSet<AgentId>,
        mut relations: BTreeMap<AgentId, AgentRelations>,
        valuation: BTreeMap<VarName, BTreeSet<WorldId>>,
    ) -> Result<Self, ModelError> {
        if worlds.is_empty() {
            return Err(ModelError::EmptyWorlds);
        }
        if agents.is_empty() {
            return Err(ModelError::EmptyAgents);
        }
        let mut sorted = worlds;
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(ModelError::DuplicateWorld(pair[0].as_str().to_owned()));
            }
        }
        let declared: BTreeSet<&WorldId> = sorted.iter().collect();
        for (agent, rels) in &relations {
            if !agents.contains(agent) {
                return Err(ModelError::UndeclaredRelationAgent(
                    agent.as_str().to_owned(),
                ));
            }
            for modality in Modality::ALL {
                for (from, to) in rels.get(modality).pairs() {
                    for world in [from, to] {
                        if !declared.contains(world) {
                            return Err(ModelError::UndeclaredRelationWorld {
                                agent: agent.as_str().to_owned(),
                                world: world.as_str().to_owned(),
                            });
                        }
                    }
                }
            }
        }
        for (var, worlds) in &valuation {
            for world in worlds {
                if !declared.contains(world) {
                    return Err(ModelError::UndeclaredValuationWorld {
                        var: var.as_str().to_owned(),
                        world: world.as_str().to_owned(),
                    });
                }
            }
        }
        // Every declared agent carries all three relations, empty if absent.
        for agent in &agents {
            relations.entry(agent.clone()).or_default();
        }
        let mut model = KripkeModel {
            worlds: sorted,
            agents,
            relations,
            valuation,
            admissible: false,
        };
        model.admissible = model.check_frame().all_passed();
        Ok(model)
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn agents(&self) -> &BTreeSet<AgentId> {
        &self.agents
    }

    pub fn relation(&self, agent: &AgentId, modality: Modality) -> Option<&Relation> {
        self.relations.get(agent).map(|r| r.get(modality))
    }

    pub fn valuation(&self) -> &BTreeMap<VarName, BTreeSet<WorldId>> {
        &self.valuation
    }

    pub fn world(&self, name: &str) -> Option<&WorldId> {
        self.worlds.iter().find(|w| w.as_str() == name)
    }

    /// Whether all frame conditions hold (cached at construction).
    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    fn holds(&self, var: &VarName, world: &WorldId) -> bool {
        self.valuation
            .get(var)
            .is_some_and(|worlds| worlds.contains(world))
    }

    /// Checks every frame condition for every agent and reports all
    /// violations with their witnesses, in canonical order.
    pub fn check_frame(&self) -> FrameReport {
        let mut conditions: Vec<ConditionReport> = FrameCondition::ALL
            .iter()
            .map(|&condition| ConditionReport {
                condition,
                violations: Vec::new(),
            })
            .collect();
        let mut record = |idx: usize, agent: &AgentId, worlds: Vec<WorldId>| {
            conditions[idx].violations.push(FrameViolation {
                agent: agent.clone(),
                worlds,
            });
        };

        for agent in &self.agents {
            let rels = &self.relations[agent];
            let k = &rels.knowledge;
            let b = &rels.belief;
            let i = &rels.intention;

            // 2: B serial.
            for w in &self.worlds {
                if b.successors(w).next().is_none() {
                    record(0, agent, vec![w.clone()]);
                }
            }
            // 3: I serial and transitive.
            for w in &self.worlds {
                if i.successors(w).next().is_none() {
                    record(1, agent, vec![w.clone()]);
                }
            }
            for (x, y) in i.pairs() {
                for z in i.successors(y) {
                    if !i.contains(x, z) {
                        record(1, agent, vec![x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
            // 4: K reflexive and transitive.
            for w in &self.worlds {
                if !k.contains(w, w) {
                    record(2, agent, vec![w.clone()]);
                }
            }
            for (x, y) in k.pairs() {
                for z in k.successors(y) {
                    if !k.contains(x, z) {
                        record(2, agent, vec![x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
            // 5: K;I within I.
            for (x, y) in k.pairs() {
                for z in i.successors(y) {
                    if !i.contains(x, z) {
                        record(3, agent, vec![x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
            // 6: B within K.
            for (x, y) in b.pairs() {
                if !k.contains(x, y) {
                    record(4, agent, vec![x.clone(), y.clone()]);
                }
            }
            // 7: K;B within B.
            for (x, y) in k.pairs() {
                for z in b.successors(y) {
                    if !b.contains(x, z) {
                        record(5, agent, vec![x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
            // 8: I;K within I.
            for (x, y) in i.pairs() {
                for z in k.successors(y) {
                    if !i.contains(x, z) {
                        record(6, agent, vec![x.clone(), y.clone(), z.clone()]);
                    }
                }
            }
        }
        FrameReport { conditions }
    }

    /// Truth at a world. Refuses models that violate the frame conditions;
    /// [`KripkeModel::eval_unchecked`] is the diagnostic escape hatch.
    pub fn eval(&self, world: &WorldId, phi: &Formula) -> Result<bool, ModelError> {
        if !self.admissible {
            return Err(ModelError::NotAdmissible);
        }
        self.eval_unchecked(world, phi)
    }

    /// Truth at a world without requiring an admissible frame. Unknown
    /// worlds or agents are still usage errors, never truth values.
    pub fn eval_unchecked(&self, world: &WorldId, phi: &Formula) -> Result<bool, ModelError> {
        if !self.worlds.contains(world) {
            return Err(ModelError::UnknownWorld(world.as_str().to_owned()));
        }
        for agent in phi.agents() {
            if !self.agents.contains(&agent) {
                return Err(ModelError::UnknownAgent(agent.as_str().to_owned()));
            }
        }
        Ok(self.truth(world, phi))
    }

    fn truth(&self, world: &WorldId, phi: &Formula) -> bool {
        match phi {
            Formula::Var(v) => self.holds(v, world),
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Not(a) => !self.truth(world, a),
            Formula::And(a, b) => self.truth(world, a) && self.truth(world, b),
            Formula::Or(a, b) => self.truth(world, a) || self.truth(world, b),
            Formula::Implies(a, b) => !self.truth(world, a) || self.truth(world, b),
            Formula::Iff(a, b) => self.truth(world, a) == self.truth(world, b),
            Formula::K(agent, a) => self.box_truth(Modality::K, agent, world, a),
            Formula::B(agent, a) => self.box_truth(Modality::B, agent, world, a),
            Formula::I(agent, a) => self.box_truth(Modality::I, agent, world, a),
        }
    }

    fn box_truth(
        &self,
        modality: Modality,
        agent: &AgentId,
        world: &WorldId,
        body: &Formula,
    ) -> bool {
        self.relations[agent]
            .get(modality)
            .successors(world)
            .all(|next| self.truth(next, body))
    }

    /// True in the model: true at every world.
    pub fn validates(&self, phi: &Formula) -> Result<bool, ModelError> {
        for world in &self.worlds {
            if !self.eval(world, phi)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn validates_unchecked(&self, phi: &Formula) -> Result<bool, ModelError> {
        for world in &self.worlds {
            if !self.eval_unchecked(world, phi)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// JSON model files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationsFile {
    #[serde(rename = "K", default, skip_serializing_if = "Vec::is_empty")]
    k: Vec<(String, String)>,
    #[serde(rename = "B", default, skip_serializing_if = "Vec::is_empty")]
    b: Vec<(String, String)>,
    #[serde(rename = "I", default, skip_serializing_if = "Vec::is_empty")]
    i: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    worlds: Vec<String>,
    agents: Vec<String>,
    relations: BTreeMap<String, RelationsFile>,
    valuation: BTreeMap<String, Vec<String>>,
}

impl KripkeModel {
    /// Parses the JSON model format. Keys are exactly `worlds`, `agents`,
    /// `relations` and `valuation`; unknown keys are rejected; array order
    /// is irrelevant.
    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        let worlds = file
            .worlds
            .into_iter()
            .map(WorldId::new)
            .collect::<Result<Vec<_>, _>>()?;
        let agents = file
            .agents
            .into_iter()
            .map(AgentId::new)
            .collect::<Result<BTreeSet<_>, _>>()?;
        let mut relations = BTreeMap::new();
        for (agent, rels) in file.relations {
            let agent = AgentId::new(agent)?;
            let mut out = AgentRelations::default();
            for (modality, pairs) in [
                (Modality::K, rels.k),
                (Modality::B, rels.b),
                (Modality::I, rels.i),
            ] {
                let rel = out.get_mut(modality);
                for (from, to) in pairs {
                    rel.insert(WorldId::new(from)?, WorldId::new(to)?);
                }
            }
            relations.insert(agent, out);
        }
        let mut valuation = BTreeMap::new();
        for (var, worlds) in file.valuation {
            let var = VarName::new(var)?;
            let worlds = worlds
                .into_iter()
                .map(WorldId::new)
                .collect::<Result<BTreeSet<_>, _>>()?;
            valuation.insert(var, worlds);
        }
        KripkeModel::new(worlds, agents, relations, valuation)
    }

    /// Canonical JSON rendering: every array sorted, two-space indent.
    pub fn to_json_string(&self) -> String {
        let pair_list = |rel: &Relation| {
            rel.pairs()
                .map(|(f, t)| (f.as_str().to_owned(), t.as_str().to_owned()))
                .collect::<Vec<_>>()
        };
        let file = ModelFile {
            worlds: self.worlds.iter().map(|w| w.as_str().to_owned()).collect(),
            agents: self.agents.iter().map(|a| a.as_str().to_owned()).collect(),
            relations: self
                .relations
                .iter()
                .map(|(agent, rels)| {
                    (
                        agent.as_str().to_owned(),
                        RelationsFile {
                            k: pair_list(&rels.knowledge),
                            b: pair_list(&rels.belief),
                            i: pair_list(&rels.intention),
                        },
                    )
                })
                .collect(),
            valuation: self
                .valuation
                .iter()
                .filter(|(_, worlds)| !worlds.is_empty())
                .map(|(var, worlds)| {
                    (
                        var.as_str().to_owned(),
                        worlds.iter().map(|w| w.as_str().to_owned()).collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }
}

// ---------------------------------------------------------------------------
// Random admissible models
// ---------------------------------------------------------------------------

/// Deterministic splitmix64 stream; the generator is pinned here so that
/// seeds keep producing identical models across toolchain and dependency
/// upgrades.
#[derive(Debug, Clone)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        self.next_u64() % den as u64 <= num as u64
    }
}

fn close_agent_relations(n: usize, k: &mut Vec<bool>, b: &mut Vec<bool>, i: &mut Vec<bool>) {
    let idx = |x: usize, y: usize| x * n + y;
    // Reflexive K, then iterate all closure rules to a fixpoint; each pass
    // only adds edges, so the loop ends within n*n additions per relation.
    for x in 0..n {
        k[idx(x, x)] = true;
    }
    let mut passes = 0usize;
    loop {
        passes += 1;
        debug_assert!(
            passes <= 3 * n * n + n + 2,
            "closure failed to reach a fixpoint within its addition budget"
        );
        let mut changed = false;
        let imply = |rel: &mut Vec<bool>, x: usize, y: usize| {
            if !rel[idx(x, y)] {
                rel[idx(x, y)] = true;
                true
            } else {
                false
            }
        };
        for x in 0..n {
            for y in 0..n {
                // 6: B within K.
                if b[idx(x, y)] {
                    changed |= imply(k, x, y);
                }
                for z in 0..n {
                    // 4: K transitive.
                    if k[idx(x, y)] && k[idx(y, z)] {
                        changed |= imply(k, x, z);
                    }
                    // 3: I transitive.
                    if i[idx(x, y)] && i[idx(y, z)] {
                        changed |= imply(i, x, z);
                    }
                    // 5: K;I within I.
                    if k[idx(x, y)] && i[idx(y, z)] {
                        changed |= imply(i, x, z);
                    }
                    // 7: K;B within B.
                    if k[idx(x, y)] && b[idx(y, z)] {
                        changed |= imply(b, x, z);
                    }
                    // 8: I;K within I.
                    if i[idx(x, y)] && k[idx(y, z)] {
                        changed |= imply(i, x, z);
                    }
                }
            }
        }
        if changed {
            continue;
        }
        // Seriality repair: give successor-less worlds a self-loop, then
        // re-close.
        let mut repaired = false;
        for rel in [&mut *b, &mut *i] {
            for x in 0..n {
                if !(0..n).any(|y| rel[idx(x, y)]) {
                    rel[idx(x, x)] = true;
                    repaired = true;
                }
            }
        }
        if !repaired {
            return;
        }
    }
}

/// Generates an admissible model, deterministically from the seed: sample
/// base relations and a valuation, then repair with the closure rules.
pub fn random_admissible_model(
    seed: u64,
    max_worlds: usize,
    agents: &BTreeSet<AgentId>,
    vars: &BTreeSet<VarName>,
) -> KripkeModel {
    assert!(max_worlds >= 1, "max_worlds must be at least 1");
    assert!(!agents.is_empty(), "agent set must be nonempty");
    let mut rng = Rng64::new(seed);
    let n = 1 + rng.below(max_worlds);
    let width = if n > 10 { 2 } else { 1 };
    let worlds: Vec<WorldId> = (0..n)
        .map(|w| WorldId::new(format!("w{w:0width$}")).unwrap())
        .collect();

    let mut relations = BTreeMap::new();
    for agent in agents {
        let mut k = vec![false; n * n];
        let mut b = vec![false; n * n];
        let mut i = vec![false; n * n];
        // Sparse base edges; the closure fills in the rest.
        for rel in [&mut k, &mut b, &mut i] {
            for cell in rel.iter_mut() {
                *cell = rng.chance(1, 4);
            }
        }
        close_agent_relations(n, &mut k, &mut b, &mut i);
        let to_relation = |bits: &Vec<bool>| {
            let mut rel = Relation::new();
            for x in 0..n {
                for y in 0..n {
                    if bits[x * n + y] {
                        rel.insert(worlds[x].clone(), worlds[y].clone());
                    }
                }
            }
            rel
        };
        relations.insert(
            agent.clone(),
            AgentRelations {
                knowledge: to_relation(&k),
                belief: to_relation(&b),
                intention: to_relation(&i),
            },
        );
    }

    let mut valuation = BTreeMap::new();
    for var in vars {
        let mut set = BTreeSet::new();
        for world in &worlds {
            if rng.chance(1, 2) {
                set.insert(world.clone());
            }
        }
        valuation.insert(var.clone(), set);
    }

    let model = KripkeModel::new(worlds, agents.clone(), relations, valuation)
        .expect("generated model is structurally valid");
    debug_assert!(model.is_admissible());
    model
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::formula::expand_secret;
    use crate::parser::parse_formula;

    fn wid(s: &str) -> WorldId {
        WorldId::new(s).unwrap()
    }

    fn agent(s: &str) -> AgentId {
        AgentId::new(s).unwrap()
    }

    fn var(s: &str) -> VarName {
        VarName::new(s).unwrap()
    }

    /// Two worlds i, j; K and B are the identity; I reaches j from
    /// everywhere; p holds exactly at j.
    pub(crate) fn intention_only_model() -> KripkeModel {
        let i = wid("i");
        let j = wid("j");
        let a = agent("a");
        let worlds = vec![i.clone(), j.clone()];
        let diag = Relation::diagonal(&worlds);
        let rels = AgentRelations {
            knowledge: diag.clone(),
            belief: diag,
            intention: Relation::from_pairs([(i.clone(), j.clone()), (j.clone(), j.clone())]),
        };
        KripkeModel::new(
            worlds,
            BTreeSet::from([a.clone()]),
            BTreeMap::from([(a, rels)]),
            BTreeMap::from([(var("p"), BTreeSet::from([j]))]),
        )
        .unwrap()
    }

    #[test]
    fn intention_only_model_is_admissible() {
        let report = intention_only_model().check_frame();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn empty_belief_fails_seriality_with_witness() {
        let i = wid("i");
        let a = agent("a");
        let rels = AgentRelations {
            knowledge: Relation::diagonal([&i]),
            belief: Relation::new(),
            intention: Relation::diagonal([&i]),
        };
        let model = KripkeModel::new(
            vec![i.clone()],
            BTreeSet::from([a.clone()]),
            BTreeMap::from([(a.clone(), rels)]),
            BTreeMap::new(),
        )
        .unwrap();
        let report = model.check_frame();
        assert!(!report.all_passed());
        let serial = &report.conditions[0];
        assert_eq!(serial.condition, FrameCondition::BeliefSerial);
        assert_eq!(
            serial.violations,
            vec![FrameViolation {
                agent: a,
                worlds: vec![i]
            }]
        );
        assert!(!model.is_admissible());
    }

    #[test]
    fn missing_composition_edge_fails_condition_five() {
        let (i, j, w) = (wid("i"), wid("j"), wid("w"));
        let a = agent("a");
        let rels = AgentRelations {
            knowledge: Relation::from_pairs([
                (i.clone(), i.clone()),
                (j.clone(), j.clone()),
                (i.clone(), j.clone()),
            ]),
            belief: Relation::diagonal([&i, &j, &w]),
            intention: Relation::from_pairs([
                (j.clone(), w.clone()),
                (i.clone(), i.clone()),
                (j.clone(), j.clone()),
                (w.clone(), w.clone()),
            ]),
        };
        let model = KripkeModel::new(
            vec![i.clone(), j.clone(), w.clone()],
            BTreeSet::from([a.clone()]),
            BTreeMap::from([(a.clone(), rels)]),
            BTreeMap::new(),
        )
        .unwrap();
        let report = model.check_frame();
        let compose = report
            .conditions
            .iter()
            .find(|c| c.condition == FrameCondition::KnowledgeIntentionCompose)
            .unwrap();
        assert!(compose.violations.contains(&FrameViolation {
            agent: a,
            worlds: vec![i, j, w],
        }));
    }

    #[test]
    fn eval_on_intention_only_model() {
        let model = intention_only_model();
        let i = wid("i");
        let ip = parse_formula("I[a] p").unwrap();
        let kp = parse_formula("K[a] p").unwrap();
        let bp = parse_formula("B[a] p").unwrap();
        assert!(model.eval(&i, &ip).unwrap());
        assert!(!model.eval(&i, &kp).unwrap());
        assert!(!model.eval(&i, &bp).unwrap());
    }

    #[test]
    fn desugared_top_is_true_everywhere() {
        let model = intention_only_model();
        let top = Formula::Top.desugar();
        for w in model.worlds() {
            assert!(model.eval(w, &top).unwrap());
        }
        assert!(model.validates(&top).unwrap());
    }

    #[test]
    fn validates_distinguishes_axiom_from_collapse() {
        let model = intention_only_model();
        let factivity = parse_formula("K[a] p -> p").unwrap();
        assert!(model.validates(&factivity).unwrap());
        let collapse = parse_formula("I[a] p -> K[a] p").unwrap();
        assert!(!model.validates(&collapse).unwrap());
        // The failure is at world i specifically.
        assert!(!model.eval(&wid("i"), &collapse).unwrap());
    }

    #[test]
    fn sugar_evaluates_like_its_expansion() {
        let model = intention_only_model();
        let a = agent("a");
        let b_agent = agent("a");
        let sugar = expand_secret(&a, &b_agent, Formula::var("p"));
        for w in model.worlds() {
            let direct = model.eval(w, &sugar).unwrap();
            let desugared = model.eval(w, &sugar.desugar()).unwrap();
            assert_eq!(direct, desugared);
        }
    }

    #[test]
    fn eval_usage_errors_are_not_truth_values() {
        let model = intention_only_model();
        let ghost = wid("ghost");
        assert!(matches!(
            model.eval(&ghost, &Formula::var("p")),
            Err(ModelError::UnknownWorld(_))
        ));
        let foreign = parse_formula("K[z] p").unwrap();
        assert!(matches!(
            model.eval(&wid("i"), &foreign),
            Err(ModelError::UnknownAgent(_))
        ));
    }

    #[test]
    fn eval_refuses_inadmissible_models_unless_unchecked() {
        let i = wid("i");
        let a = agent("a");
        let rels = AgentRelations {
            knowledge: Relation::new(), // not reflexive
            belief: Relation::diagonal([&i]),
            intention: Relation::diagonal([&i]),
        };
        let model = KripkeModel::new(
            vec![i.clone()],
            BTreeSet::from([a.clone()]),
            BTreeMap::from([(a, rels)]),
            BTreeMap::new(),
        )
        .unwrap();
        assert!(matches!(
            model.eval(&i, &Formula::var("p")),
            Err(ModelError::NotAdmissible)
        ));
        assert!(!model.eval_unchecked(&i, &Formula::var("p")).unwrap());
    }

    #[test]
    fn box_is_antitone_in_the_relation() {
        // Growing a relation can only falsify a box, never verify one.
        let i = wid("i");
        let j = wid("j");
        let a = agent("a");
        let worlds = vec![i.clone(), j.clone()];
        let small = Relation::diagonal(&worlds);
        let mut large = small.clone();
        large.insert(i.clone(), j.clone());
        let build = |intention: Relation| {
            KripkeModel::new(
                worlds.clone(),
                BTreeSet::from([a.clone()]),
                BTreeMap::from([(
                    a.clone(),
                    AgentRelations {
                        knowledge: Relation::diagonal(&worlds),
                        belief: Relation::diagonal(&worlds),
                        intention,
                    },
                )]),
                BTreeMap::from([(var("p"), BTreeSet::from([i.clone()]))]),
            )
            .unwrap()
        };
        let phi = parse_formula("I[a] p").unwrap();
        let m_small = build(small);
        let m_large = build(large);
        for w in &worlds {
            if m_large.eval(w, &phi).unwrap() {
                assert!(m_small.eval(w, &phi).unwrap());
            }
        }
    }

    #[test]
    fn desugar_preserves_truth_on_every_small_structure() {
        // Exhaustive: all one- and two-world structures over one agent and
        // two variables, admissible or not, agree with the desugared form
        // of a panel of sugared formulas at every world.
        let a = agent("a");
        let cases = [
            parse_formula("p | q").unwrap(),
            parse_formula("p -> q").unwrap(),
            parse_formula("(p -> q) <-> (~q -> ~p)").unwrap(),
            parse_formula("true -> p | false").unwrap(),
            parse_formula("K[a] (p | q) -> (I[a] p <-> B[a] q)").unwrap(),
        ];
        let mut structures = 0;
        for n in 1..=2usize {
            let worlds: Vec<WorldId> = (0..n)
                .map(|w| WorldId::new(format!("n{w}")).unwrap())
                .collect();
            let edges = n * n;
            let make_rel = |bits: u32| {
                let mut rel = Relation::new();
                for e in 0..edges {
                    if bits >> e & 1 == 1 {
                        rel.insert(worlds[e / n].clone(), worlds[e % n].clone());
                    }
                }
                rel
            };
            for k_bits in 0..1u32 << edges {
                for i_bits in 0..1u32 << edges {
                    // Tie B to K to keep the sweep small; B's shape cannot
                    // matter for truth preservation anyway.
                    let rels = AgentRelations {
                        knowledge: make_rel(k_bits),
                        belief: make_rel(k_bits),
                        intention: make_rel(i_bits),
                    };
                    for val_bits in 0..1u32 << (2 * n) {
                        let valuation: BTreeMap<VarName, BTreeSet<WorldId>> = [("p", 0), ("q", 1)]
                            .into_iter()
                            .map(|(name, vi)| {
                                let holds = (0..n)
                                    .filter(|w| val_bits >> (vi * n + w) & 1 == 1)
                                    .map(|w| worlds[w].clone())
                                    .collect();
                                (var(name), holds)
                            })
                            .collect();
                        let model = KripkeModel::new(
                            worlds.clone(),
                            BTreeSet::from([a.clone()]),
                            BTreeMap::from([(a.clone(), rels.clone())]),
                            valuation,
                        )
                        .unwrap();
                        structures += 1;
                        for phi in &cases {
                            let desugared = phi.desugar();
                            for w in model.worlds() {
                                assert_eq!(
                                    model.eval_unchecked(w, phi).unwrap(),
                                    model.eval_unchecked(w, &desugared).unwrap(),
                                );
                            }
                        }
                    }
                }
            }
        }
        assert!(structures > 4000);
    }

    #[test]
    fn random_model_generation_is_seed_deterministic() {
        let agents = BTreeSet::from([agent("a"), agent("b")]);
        let vars = BTreeSet::from([var("p"), var("q")]);
        for seed in [0, 1, 42, 0xdead] {
            let first = random_admissible_model(seed, 4, &agents, &vars);
            let second = random_admissible_model(seed, 4, &agents, &vars);
            assert_eq!(first, second);
        }
    }

    #[test]
    fn random_models_are_admissible() {
        let agents = BTreeSet::from([agent("a"), agent("b")]);
        let vars = BTreeSet::from([var("p"), var("q"), var("r")]);
        for seed in 0..2000 {
            let model = random_admissible_model(seed, 4, &agents, &vars);
            assert!(model.check_frame().all_passed(), "seed {seed}");
        }
    }

    #[test]
    fn one_world_random_model_is_forced() {
        let agents = BTreeSet::from([agent("a")]);
        let vars = BTreeSet::from([var("p")]);
        let model = random_admissible_model(0, 1, &agents, &vars);
        let w = model.worlds()[0].clone();
        for modality in Modality::ALL {
            let rel = model.relation(&agent("a"), modality).unwrap();
            assert!(rel.contains(&w, &w));
            assert_eq!(rel.len(), 1);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            /// Sugared connectives evaluate exactly like their expansions on
            /// randomly generated admissible models.
            #[test]
            fn sugar_matches_desugared(
                phi in crate::parser::tests::arb_formula(4),
                seed in any::<u64>(),
            ) {
                let agents = BTreeSet::from([
                    AgentId::new("a").unwrap(),
                    AgentId::new("b").unwrap(),
                    AgentId::new("c").unwrap(),
                ]);
                let vars = BTreeSet::from([
                    VarName::new("p").unwrap(),
                    VarName::new("q").unwrap(),
                    VarName::new("r").unwrap(),
                ]);
                let model = random_admissible_model(seed, 3, &agents, &vars);
                let desugared = phi.desugar();
                for w in model.worlds() {
                    prop_assert_eq!(
                        model.eval(w, &phi).unwrap(),
                        model.eval(w, &desugared).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn json_roundtrip_and_canonical_order() {
        let model = intention_only_model();
        let text = model.to_json_string();
        let back = KripkeModel::from_json_str(&text).unwrap();
        assert_eq!(model, back);
        // Shuffled arrays parse to the same model.
        let shuffled = r#"{
            "worlds": ["j", "i"],
            "agents": ["a"],
            "relations": {"a": {
                "K": [["j","j"],["i","i"]],
                "B": [["i","i"],["j","j"]],
                "I": [["j","j"],["i","j"]]
            }},
            "valuation": {"p": ["j"]}
        }"#;
        assert_eq!(KripkeModel::from_json_str(shuffled).unwrap(), model);
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let text = r#"{
            "worlds": ["i"], "agents": ["a"],
            "relations": {"a": {"K": [["i","i"]], "B": [["i","i"]], "I": [["i","i"]]}},
            "valuation": {}, "comment": "nope"
        }"#;
        assert!(KripkeModel::from_json_str(text).is_err());
        let inner = r#"{
            "worlds": ["i"], "agents": ["a"],
            "relations": {"a": {"K": [["i","i"]], "B": [["i","i"]], "I": [["i","i"]], "X": []}},
            "valuation": {}
        }"#;
        assert!(KripkeModel::from_json_str(inner).is_err());
    }

    #[test]
    fn json_rejects_undeclared_worlds() {
        let text = r#"{
            "worlds": ["i"], "agents": ["a"],
            "relations": {"a": {"K": [["i","u"]], "B": [["i","i"]], "I": [["i","i"]]}},
            "valuation": {}
        }"#;
        assert!(matches!(
            KripkeModel::from_json_str(text),
            Err(ModelError::UndeclaredRelationWorld { .. })
        ));
    }
}
