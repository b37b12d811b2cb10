//! Filtration: the finite quotient of a model through the subformula
//! closure of a translated formula.
//!
//! Worlds agreeing on every member of the closure `theta` collapse into one
//! class, represented by the lexicographically least member. The quotient
//! relations are defined by truth preservation:
//!
//! - `K~(i,j)` iff every `K[a]`-, `I[a]`- and `B[a]`-boxed member of theta
//!   true at `i` stays true at `j`;
//! - `I~(i,j)` iff every `I[a]`-boxed member true at `i` stays true at `j`
//!   and its body holds at `j`;
//! - `B~(i,j)` iff the `K~` conditions hold and every `B[a]`-boxed member
//!   true at `i` stays true at `j` with its body holding at `j`.
//!
//! The formula is translated (an inner knowledge box under every intention
//! box) before taking the closure; this is what lets the quotient satisfy
//! the composition law `I;K within I`, and it changes no truth values.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{
    subformulas, translate_t, AgentId, Formula, FormulaError, FormulaSet, Modality,
};
use crate::kripke::{AgentRelations, FrameReport, KripkeModel, ModelError, WorldId};

#[derive(Debug, Error)]
pub enum FiltrationError {
    #[error("formula must be desugared first: {0}")]
    NotDesugared(#[from] FormulaError),
    #[error("model violates the frame conditions")]
    NotAdmissible,
    #[error("model does not declare agent {0}")]
    MissingAgent(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A filtration quotient.
#[derive(Debug, Clone)]
pub struct FiltrationResult {
    /// The quotient model over the class representatives.
    pub model: KripkeModel,
    /// Original world to its class representative.
    pub class_map: BTreeMap<WorldId, WorldId>,
    /// Subformula closure of the translated formula.
    pub theta: FormulaSet,
}

/// Truth of every closure member at every world of a model.
struct TruthTable<'m> {
    model: &'m KripkeModel,
    members: Vec<Formula>,
    /// `cells[world_index][member_index]`
    cells: Vec<Vec<bool>>,
}

impl<'m> TruthTable<'m> {
    fn build(model: &'m KripkeModel, theta: &FormulaSet) -> Result<Self, ModelError> {
        let members: Vec<Formula> = theta.iter().cloned().collect();
        let mut cells = Vec::with_capacity(model.worlds().len());
        for world in model.worlds() {
            let mut row = Vec::with_capacity(members.len());
            for member in &members {
                row.push(model.eval_unchecked(world, member)?);
            }
            cells.push(row);
        }
        Ok(TruthTable {
            model,
            members,
            cells,
        })
    }

    fn index_of(&self, phi: &Formula) -> usize {
        self.members
            .binary_search(phi)
            .expect("member of the closure")
    }

    fn world_index(&self, world: &WorldId) -> usize {
        self.model
            .worlds()
            .iter()
            .position(|w| w == world)
            .expect("declared world")
    }

    fn truth(&self, world: &WorldId, member: usize) -> bool {
        self.cells[self.world_index(world)][member]
    }

    /// Boxed members of theta for one agent: (modality, box index, body index).
    fn boxes_of(&self, agent: &AgentId) -> Vec<(Modality, usize, usize)> {
        let mut out = Vec::new();
        for (index, member) in self.members.iter().enumerate() {
            let (modality, owner, body) = match member {
                Formula::K(a, body) => (Modality::K, a, body),
                Formula::B(a, body) => (Modality::B, a, body),
                Formula::I(a, body) => (Modality::I, a, body),
                _ => continue,
            };
            if owner == agent {
                out.push((modality, index, self.index_of(body)));
            }
        }
        out
    }
}

fn quotient_related(
    table: &TruthTable<'_>,
    boxes: &[(Modality, usize, usize)],
    modality: Modality,
    from: &WorldId,
    to: &WorldId,
) -> bool {
    for &(box_modality, box_index, body_index) in boxes {
        if !table.truth(from, box_index) {
            continue;
        }
        let preserved = table.truth(to, box_index);
        let body_holds = table.truth(to, body_index);
        let ok = match (modality, box_modality) {
            // K~ preserves all three kinds of boxes.
            (Modality::K, _) => preserved,
            // I~ only constrains intention boxes, with their bodies.
            (Modality::I, Modality::I) => preserved && body_holds,
            (Modality::I, _) => true,
            // B~ preserves all boxes and adds body truth for belief boxes.
            (Modality::B, Modality::B) => preserved && body_holds,
            (Modality::B, _) => preserved,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Quotients an admissible model through the closure of the translated
/// formula. Deterministic: each class is represented by its least world.
pub fn filtrate(model: &KripkeModel, phi: &Formula) -> Result<FiltrationResult, FiltrationError> {
    phi.require_primitive()?;
    if !model.is_admissible() {
        return Err(FiltrationError::NotAdmissible);
    }
    for agent in phi.agents() {
        if !model.agents().contains(&agent) {
            return Err(FiltrationError::MissingAgent(agent.as_str().to_owned()));
        }
    }
    let theta = subformulas(&translate_t(phi))?;
    let table = TruthTable::build(model, &theta)?;

    // Group worlds by their truth signature; worlds come sorted, so the
    // first member of each class is the least one.
    let mut classes: BTreeMap<&Vec<bool>, Vec<&WorldId>> = BTreeMap::new();
    for (index, world) in model.worlds().iter().enumerate() {
        classes.entry(&table.cells[index]).or_default().push(world);
    }
    let mut class_map = BTreeMap::new();
    for members in classes.values() {
        let representative = members[0];
        for member in members {
            class_map.insert((*member).clone(), representative.clone());
        }
    }
    let representatives: Vec<WorldId> = {
        let mut reps: Vec<WorldId> = classes.values().map(|ms| ms[0].clone()).collect();
        reps.sort();
        reps
    };

    let mut relations = BTreeMap::new();
    for agent in model.agents() {
        let boxes = table.boxes_of(agent);
        let mut rels = AgentRelations::default();
        for modality in Modality::ALL {
            let rel = rels.get_mut(modality);
            for from in &representatives {
                for to in &representatives {
                    if quotient_related(&table, &boxes, modality, from, to) {
                        rel.insert(from.clone(), to.clone());
                    }
                }
            }
        }
        relations.insert(agent.clone(), rels);
    }

    let valuation = model
        .valuation()
        .iter()
        .map(|(var, worlds)| {
            let kept = worlds
                .iter()
                .filter(|w| representatives.contains(w))
                .cloned()
                .collect();
            (var.clone(), kept)
        })
        .collect();

    let quotient = KripkeModel::new(
        representatives,
        model.agents().clone(),
        relations,
        valuation,
    )?;
    Ok(FiltrationResult {
        model: quotient,
        class_map,
        theta,
    })
}

/// A failed instance of the first filtration condition: the original model
/// steps from `from` to `via`, whose class is `to`, yet the quotient lacks
/// the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionOneFault {
    pub agent: AgentId,
    pub modality: Modality,
    pub from: WorldId,
    pub via: WorldId,
    pub to: WorldId,
}

impl fmt::Display for ConditionOneFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}]: edge {}->{} (class of {}) missing in the quotient",
            self.modality, self.agent, self.from, self.to, self.via
        )
    }
}

/// A failed instance of the second filtration condition: the quotient
/// relates `from` to `to` although a boxed member true at `from` has a body
/// false at `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionTwoFault {
    pub agent: AgentId,
    pub modality: Modality,
    pub from: WorldId,
    pub to: WorldId,
    pub boxed: Formula,
}

/// A closure member whose truth changed between the original world and its
/// representative in the quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthFault {
    pub world: WorldId,
    pub member: Formula,
    pub original: bool,
    pub filtered: bool,
}

/// Outcome of [`verify_filtration`]; everything is recomputed from the
/// original model and formula, nothing is trusted from the construction.
#[derive(Debug, Clone)]
pub struct FiltrationReport {
    /// The stored closure equals the recomputed closure of the translated
    /// formula.
    pub theta_matches: bool,
    /// Every original world maps to a representative that is a declared
    /// world of the quotient within the same truth class.
    pub class_map_faults: Vec<WorldId>,
    pub condition_one: Vec<ConditionOneFault>,
    pub condition_two: Vec<ConditionTwoFault>,
    /// Frame conditions of the quotient model.
    pub frame: FrameReport,
    /// Truth agreement on the closure at every representative.
    pub truth: Vec<TruthFault>,
    /// The representative count against two to the closure size.
    pub size_within_bound: bool,
}

impl FiltrationReport {
    pub fn is_ok(&self) -> bool {
        self.theta_matches
            && self.class_map_faults.is_empty()
            && self.condition_one.is_empty()
            && self.condition_two.is_empty()
            && self.frame.all_passed()
            && self.truth.is_empty()
            && self.size_within_bound
    }
}

/// Independently re-checks a filtration: both defining conditions of a
/// filtration, admissibility of the quotient, and the truth lemma on the
/// closure.
pub fn verify_filtration(
    model: &KripkeModel,
    filtration: &FiltrationResult,
    phi: &Formula,
) -> Result<FiltrationReport, FiltrationError> {
    phi.require_primitive()?;
    let theta = subformulas(&translate_t(phi))?;
    let theta_matches = theta == filtration.theta;
    let table = TruthTable::build(model, &theta)?;
    let quotient = &filtration.model;

    let mut class_map_faults = Vec::new();
    for world in model.worlds() {
        match filtration.class_map.get(world) {
            Some(rep)
                if quotient.worlds().contains(rep)
                    && table.cells[table.world_index(world)]
                        == table.cells[table.world_index(rep)] => {}
            _ => class_map_faults.push(world.clone()),
        }
    }

    // Condition 1: an original edge into any member of a class forces the
    // quotient edge onto its representative (the middle world ranges over
    // the whole original model, not just representatives).
    let mut condition_one = Vec::new();
    for agent in model.agents() {
        for modality in Modality::ALL {
            let original = model.relation(agent, modality).expect("declared agent");
            let filtered = quotient.relation(agent, modality).expect("same agents");
            for (from, via) in original.pairs() {
                if !quotient.worlds().contains(from) {
                    continue;
                }
                let Some(to) = filtration.class_map.get(via) else {
                    continue; // already reported as a class map fault
                };
                if !filtered.contains(from, to) {
                    condition_one.push(ConditionOneFault {
                        agent: agent.clone(),
                        modality,
                        from: from.clone(),
                        via: via.clone(),
                        to: to.clone(),
                    });
                }
            }
        }
    }

    // Condition 2: along every quotient edge, boxed closure members true at
    // the source have true bodies at the target (in the original model).
    let mut condition_two = Vec::new();
    for agent in model.agents() {
        let boxes = table.boxes_of(agent);
        for modality in Modality::ALL {
            let filtered = quotient.relation(agent, modality).expect("same agents");
            for (from, to) in filtered.pairs() {
                for &(box_modality, box_index, body_index) in &boxes {
                    if box_modality != modality {
                        continue;
                    }
                    if table.truth(from, box_index) && !table.truth(to, body_index) {
                        condition_two.push(ConditionTwoFault {
                            agent: agent.clone(),
                            modality,
                            from: from.clone(),
                            to: to.clone(),
                            boxed: table.members[box_index].clone(),
                        });
                    }
                }
            }
        }
    }

    let frame = quotient.check_frame();

    let mut truth = Vec::new();
    for world in quotient.worlds() {
        for member in &theta {
            let original = model.eval_unchecked(world, member)?;
            let filtered = quotient.eval_unchecked(world, member)?;
            if original != filtered {
                truth.push(TruthFault {
                    world: world.clone(),
                    member: member.clone(),
                    original,
                    filtered,
                });
            }
        }
    }

    let size_within_bound = match 1usize.checked_shl(theta.len() as u32) {
        Some(bound) => quotient.worlds().len() <= bound,
        None => true,
    };

    Ok(FiltrationReport {
        theta_matches,
        class_map_faults,
        condition_one,
        condition_two,
        frame,
        truth,
        size_within_bound,
    })
}

/// Removes one quotient edge; test helper for planting faults.
#[cfg(test)]
fn without_edge(
    filtration: &FiltrationResult,
    agent: &AgentId,
    modality: Modality,
    from: &WorldId,
    to: &WorldId,
) -> FiltrationResult {
    let model = &filtration.model;
    let mut relations = BTreeMap::new();
    for a in model.agents() {
        let mut rels = AgentRelations::default();
        for m in Modality::ALL {
            let mut rel = model.relation(a, m).unwrap().clone();
            if a == agent && m == modality {
                rel.remove(from, to);
            }
            *rels.get_mut(m) = rel;
        }
        relations.insert(a.clone(), rels);
    }
    FiltrationResult {
        model: KripkeModel::new(
            model.worlds().to_vec(),
            model.agents().clone(),
            relations,
            model.valuation().clone(),
        )
        .expect("still structurally valid"),
        class_map: filtration.class_map.clone(),
        theta: filtration.theta.clone(),
    }
}
