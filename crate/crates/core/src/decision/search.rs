//! Tier engine for the counter-model search.
//!
//! A tier fixes the world count `n` and hunts for an admissible model that
//! falsifies the formula at world 0 (world labels are interchangeable, so
//! pinning the falsifying world loses nothing). The assignment state is a
//! three-valued grid: one cell per valuation bit and per relation edge of
//! every agent occurring in the formula. The loop is driven by a Kleene
//! evaluation of the formula at world 0:
//!
//! - definitely true: no completion of this branch can falsify — prune;
//! - unknown: branch on the first cell that blocks the evaluation;
//! - definitely false: every completion falsifies — fill the remaining
//!   cells in canonical order and return the model.
//!
//! Setting an edge present eagerly propagates the frame conditions
//! (reflexivity and transitivity of `K`, transitivity of `I`, `B ⊆ K` and
//! the three composition laws), so inconsistent branches die at the moment
//! of assignment; seriality of `B` and `I` is tracked with per-row
//! possibility counters. Agents that do not occur in the formula never
//! influence its truth value, so their relations are not searched at all
//! and the returned model pads them with identity relations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use crate::formula::{AgentId, Formula, Modality, VarName};
use crate::kripke::{AgentRelations, KripkeModel, Relation, WorldId};

#[derive(Debug)]
pub(crate) enum TierOutcome {
    Found(KripkeModel),
    Exhausted,
    TimedOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Var(usize),
    Not(usize),
    And(usize, usize),
    Boxed(usize, usize), // relation index (agent * 3 + modality), child
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    False,
    True,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Val { var: usize, world: usize },
    Edge { rel: usize, from: usize, to: usize },
}

fn modality_index(m: Modality) -> usize {
    match m {
        Modality::K => 0,
        Modality::B => 1,
        Modality::I => 2,
    }
}

fn world_width(n: usize) -> usize {
    (n - 1).max(1).ilog10() as usize + 1
}

fn world_name(n: usize, index: usize) -> String {
    format!("w{index:0width$}", width = world_width(n))
}

pub(crate) fn falsifying_world_name(n: usize) -> String {
    world_name(n, 0)
}

pub(crate) struct Engine {
    nodes: Vec<Node>,
    root: usize,
    vars: Vec<VarName>,
    searched: Vec<AgentId>,
    all_agents: Vec<AgentId>,
}

impl Engine {
    /// Compiles a primitive-form formula into a deduplicated node arena.
    pub(crate) fn new(phi: &Formula, agents: &BTreeSet<AgentId>) -> Engine {
        let searched: Vec<AgentId> = phi.agents().into_iter().collect();
        let vars: Vec<VarName> = phi.variables().into_iter().collect();
        let mut nodes = Vec::new();
        let mut dedup = HashMap::new();
        let root = compile(phi, &searched, &vars, &mut nodes, &mut dedup);
        Engine {
            nodes,
            root,
            vars,
            searched,
            all_agents: agents.iter().cloned().collect(),
        }
    }

    pub(crate) fn run_tier(&self, n: usize, deadline: Instant) -> TierOutcome {
        // Tier state size in cells; refuse tiers that would not fit rather
        // than thrash, reporting them like a blown budget.
        let rels = self.searched.len() * 3;
        let cells = (rels as u128) * (n as u128) * (n as u128)
            + 16 * (self.nodes.len() as u128) * (n as u128)
            + (self.vars.len() as u128) * (n as u128);
        if cells > 64 * 1024 * 1024 {
            return TierOutcome::TimedOut;
        }
        let mut tier = Tier::new(self, n);
        tier.init();

        struct Decision {
            cell: Cell,
            mark: usize,
            flipped: bool,
        }
        let mut decisions: Vec<Decision> = Vec::new();
        let mut ticks: u32 = 0;

        loop {
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(1024) && Instant::now() >= deadline {
                return TierOutcome::TimedOut;
            }
            tier.stamp += 1;
            let verdict = tier.pe(self.root, 0);
            let next = match verdict {
                Tri::True => None,
                Tri::Unknown => Some(tier.choose(self.root, 0)),
                Tri::False => tier.first_unassigned(),
            };
            match next {
                Some(cell) => {
                    let mark = tier.trail.len();
                    if tier.try_assign(cell, false) {
                        decisions.push(Decision {
                            cell,
                            mark,
                            flipped: false,
                        });
                        continue;
                    }
                    if tier.try_assign(cell, true) {
                        decisions.push(Decision {
                            cell,
                            mark,
                            flipped: true,
                        });
                        continue;
                    }
                    // Both polarities conflict immediately; fall through.
                }
                None if verdict == Tri::False => {
                    return TierOutcome::Found(tier.build_model());
                }
                None => {}
            }
            // Backtrack to the deepest decision with an untried polarity.
            loop {
                let Some(decision) = decisions.pop() else {
                    return TierOutcome::Exhausted;
                };
                tier.undo_to(decision.mark);
                if !decision.flipped && tier.try_assign(decision.cell, true) {
                    decisions.push(Decision {
                        cell: decision.cell,
                        mark: decision.mark,
                        flipped: true,
                    });
                    break;
                }
            }
        }
    }
}

fn compile(
    phi: &Formula,
    agents: &[AgentId],
    vars: &[VarName],
    nodes: &mut Vec<Node>,
    dedup: &mut HashMap<Node, usize>,
) -> usize {
    let node = match phi {
        Formula::Var(v) => Node::Var(vars.binary_search(v).expect("collected variable")),
        Formula::Not(a) => Node::Not(compile(a, agents, vars, nodes, dedup)),
        Formula::And(a, b) => {
            let left = compile(a, agents, vars, nodes, dedup);
            let right = compile(b, agents, vars, nodes, dedup);
            Node::And(left, right)
        }
        Formula::K(ag, a) | Formula::B(ag, a) | Formula::I(ag, a) => {
            let modality = match phi {
                Formula::K(_, _) => Modality::K,
                Formula::B(_, _) => Modality::B,
                _ => Modality::I,
            };
            let agent = agents.binary_search(ag).expect("collected agent");
            let child = compile(a, agents, vars, nodes, dedup);
            Node::Boxed(agent * 3 + modality_index(modality), child)
        }
        _ => unreachable!("caller checked primitive form"),
    };
    if let Some(&index) = dedup.get(&node) {
        return index;
    }
    nodes.push(node);
    let index = nodes.len() - 1;
    dedup.insert(node, index);
    index
}

struct Tier<'e> {
    engine: &'e Engine,
    n: usize,
    val: Vec<Tri>,
    edge: Vec<Tri>,
    /// Per relation row: how many targets are still present or undecided.
    /// Rows of `B` and `I` must never drop to zero (seriality).
    slots: Vec<u32>,
    trail: Vec<Cell>,
    memo: Vec<(u64, Tri)>,
    stamp: u64,
}

impl<'e> Tier<'e> {
    fn new(engine: &'e Engine, n: usize) -> Self {
        let rels = engine.searched.len() * 3;
        Tier {
            engine,
            n,
            val: vec![Tri::Unknown; engine.vars.len() * n],
            edge: vec![Tri::Unknown; rels * n * n],
            slots: vec![n as u32; rels * n],
            trail: Vec::new(),
            memo: vec![(0, Tri::Unknown); engine.nodes.len() * n],
            stamp: 0,
        }
    }

    fn init(&mut self) {
        // Knowledge is reflexive; everything else follows by propagation.
        for agent in 0..self.engine.searched.len() {
            for w in 0..self.n {
                let ok = self.try_assign(
                    Cell::Edge {
                        rel: agent * 3,
                        from: w,
                        to: w,
                    },
                    true,
                );
                debug_assert!(ok, "reflexive loops cannot conflict");
            }
        }
    }

    fn edge_index(&self, rel: usize, from: usize, to: usize) -> usize {
        (rel * self.n + from) * self.n + to
    }

    fn get(&self, cell: Cell) -> Tri {
        match cell {
            Cell::Val { var, world } => self.val[var * self.n + world],
            Cell::Edge { rel, from, to } => self.edge[self.edge_index(rel, from, to)],
        }
    }

    /// Assigns a cell and propagates; on conflict the state is rolled back
    /// and `false` returned.
    fn try_assign(&mut self, cell: Cell, value: bool) -> bool {
        let mark = self.trail.len();
        if self.place(cell, value) {
            true
        } else {
            self.undo_to(mark);
            false
        }
    }

    fn place(&mut self, cell: Cell, value: bool) -> bool {
        let mut queue: Vec<(Cell, bool)> = vec![(cell, value)];
        while let Some((cell, value)) = queue.pop() {
            let tri = if value { Tri::True } else { Tri::False };
            match self.get(cell) {
                Tri::Unknown => {}
                existing => {
                    if existing == tri {
                        continue;
                    }
                    return false;
                }
            }
            match cell {
                Cell::Val { var, world } => {
                    self.val[var * self.n + world] = tri;
                    self.trail.push(cell);
                }
                Cell::Edge { rel, from, to } => {
                    let index = self.edge_index(rel, from, to);
                    self.edge[index] = tri;
                    self.trail.push(cell);
                    if value {
                        self.propagate_present(rel, from, to, &mut queue);
                    } else {
                        let row = rel * self.n + from;
                        self.slots[row] -= 1;
                        // Seriality of B and I: a row cannot go fully absent.
                        if self.slots[row] == 0 && rel % 3 != 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn propagate_present(&self, rel: usize, from: usize, to: usize, queue: &mut Vec<(Cell, bool)>) {
        let agent = rel / 3;
        let (k, b, i) = (agent * 3, agent * 3 + 1, agent * 3 + 2);
        let n = self.n;
        let mut force = |rel: usize, from: usize, to: usize| {
            queue.push((Cell::Edge { rel, from, to }, true));
        };
        let present =
            |rel: usize, from: usize, to: usize| self.edge[(rel * n + from) * n + to] == Tri::True;
        match rel % 3 {
            // A new K(from,to).
            0 => {
                for x in 0..n {
                    if present(k, to, x) {
                        force(k, from, x); // K transitive
                    }
                    if present(k, x, from) {
                        force(k, x, to); // K transitive
                    }
                    if present(i, to, x) {
                        force(i, from, x); // K;I within I
                    }
                    if present(b, to, x) {
                        force(b, from, x); // K;B within B
                    }
                    if present(i, x, from) {
                        force(i, x, to); // I;K within I
                    }
                }
            }
            // A new B(from,to).
            1 => {
                force(k, from, to); // B within K
                for x in 0..n {
                    if present(k, x, from) {
                        force(b, x, to); // K;B within B
                    }
                }
            }
            // A new I(from,to).
            _ => {
                for x in 0..n {
                    if present(i, to, x) {
                        force(i, from, x); // I transitive
                    }
                    if present(i, x, from) {
                        force(i, x, to); // I transitive
                    }
                    if present(k, x, from) {
                        force(i, x, to); // K;I within I
                    }
                    if present(k, to, x) {
                        force(i, from, x); // I;K within I
                    }
                }
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let cell = self.trail.pop().unwrap();
            match cell {
                Cell::Val { var, world } => self.val[var * self.n + world] = Tri::Unknown,
                Cell::Edge { rel, from, to } => {
                    let index = self.edge_index(rel, from, to);
                    if self.edge[index] == Tri::False {
                        self.slots[rel * self.n + from] += 1;
                    }
                    self.edge[index] = Tri::Unknown;
                }
            }
        }
    }

    /// Kleene evaluation at a world: `True` and `False` are definite for
    /// every completion of the undecided cells.
    fn pe(&mut self, node: usize, world: usize) -> Tri {
        let key = node * self.n + world;
        if self.memo[key].0 == self.stamp {
            return self.memo[key].1;
        }
        let result = match self.engine.nodes[node] {
            Node::Var(var) => self.val[var * self.n + world],
            Node::Not(child) => match self.pe(child, world) {
                Tri::True => Tri::False,
                Tri::False => Tri::True,
                Tri::Unknown => Tri::Unknown,
            },
            Node::And(left, right) => match self.pe(left, world) {
                Tri::False => Tri::False,
                left_value => match (left_value, self.pe(right, world)) {
                    (_, Tri::False) => Tri::False,
                    (Tri::True, Tri::True) => Tri::True,
                    _ => Tri::Unknown,
                },
            },
            Node::Boxed(rel, child) => {
                let mut result = Tri::True;
                for j in 0..self.n {
                    match self.edge[self.edge_index(rel, world, j)] {
                        Tri::False => {}
                        Tri::True => match self.pe(child, j) {
                            Tri::False => {
                                result = Tri::False;
                                break;
                            }
                            Tri::Unknown => result = Tri::Unknown,
                            Tri::True => {}
                        },
                        Tri::Unknown => {
                            // The edge may end up absent, so a non-true
                            // child only makes the box undecided.
                            if self.pe(child, j) != Tri::True {
                                result = Tri::Unknown;
                            }
                        }
                    }
                }
                result
            }
        };
        self.memo[key] = (self.stamp, result);
        result
    }

    /// First undecided cell blocking the evaluation, in a fixed traversal
    /// order. Only called when `pe(node, world)` is `Unknown` under the
    /// current stamp.
    fn choose(&mut self, node: usize, world: usize) -> Cell {
        match self.engine.nodes[node] {
            Node::Var(var) => Cell::Val { var, world },
            Node::Not(child) => self.choose(child, world),
            Node::And(left, right) => {
                if self.pe(left, world) == Tri::Unknown {
                    self.choose(left, world)
                } else {
                    self.choose(right, world)
                }
            }
            Node::Boxed(rel, child) => {
                for j in 0..self.n {
                    match self.edge[self.edge_index(rel, world, j)] {
                        Tri::False => {}
                        Tri::Unknown => {
                            if self.pe(child, j) != Tri::True {
                                return Cell::Edge {
                                    rel,
                                    from: world,
                                    to: j,
                                };
                            }
                        }
                        Tri::True => {
                            if self.pe(child, j) == Tri::Unknown {
                                return self.choose(child, j);
                            }
                        }
                    }
                }
                unreachable!("an undecided box has a blocking successor")
            }
        }
    }

    /// Next undecided cell in canonical order: valuation bits first, then
    /// edges by (agent, modality, source, target).
    fn first_unassigned(&self) -> Option<Cell> {
        for (index, tri) in self.val.iter().enumerate() {
            if *tri == Tri::Unknown {
                return Some(Cell::Val {
                    var: index / self.n,
                    world: index % self.n,
                });
            }
        }
        for (index, tri) in self.edge.iter().enumerate() {
            if *tri == Tri::Unknown {
                let (row, to) = (index / self.n, index % self.n);
                return Some(Cell::Edge {
                    rel: row / self.n,
                    from: row % self.n,
                    to,
                });
            }
        }
        None
    }

    /// Materializes the fully assigned tier as a model. Agents outside the
    /// formula get identity relations, which satisfy every frame condition
    /// and cannot change the formula's truth value.
    fn build_model(&self) -> KripkeModel {
        let n = self.n;
        let worlds: Vec<WorldId> = (0..n)
            .map(|w| WorldId::new(world_name(n, w)).unwrap())
            .collect();
        let mut relations = BTreeMap::new();
        for (agent_index, agent) in self.engine.searched.iter().enumerate() {
            let mut rels = AgentRelations::default();
            for modality in Modality::ALL {
                let rel = agent_index * 3 + modality_index(modality);
                let target = rels.get_mut(modality);
                for from in 0..n {
                    for to in 0..n {
                        if self.edge[self.edge_index(rel, from, to)] == Tri::True {
                            target.insert(worlds[from].clone(), worlds[to].clone());
                        }
                    }
                }
            }
            relations.insert(agent.clone(), rels);
        }
        for agent in &self.engine.all_agents {
            relations
                .entry(agent.clone())
                .or_insert_with(|| AgentRelations {
                    knowledge: Relation::diagonal(&worlds),
                    belief: Relation::diagonal(&worlds),
                    intention: Relation::diagonal(&worlds),
                });
        }
        let mut valuation = BTreeMap::new();
        for (var_index, var) in self.engine.vars.iter().enumerate() {
            let holds: BTreeSet<WorldId> = (0..n)
                .filter(|w| self.val[var_index * n + w] == Tri::True)
                .map(|w| worlds[w].clone())
                .collect();
            valuation.insert(var.clone(), holds);
        }
        KripkeModel::new(
            worlds,
            self.engine.all_agents.iter().cloned().collect(),
            relations,
            valuation,
        )
        .expect("search models are structurally valid")
    }
}
