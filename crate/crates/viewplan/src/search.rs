//! State-space search over ground tasks.
//!
//! Two production solvers share one node store:
//! * `Satisficing` ('S'): lazy greedy best-first search guided by the
//!   relaxed-plan heuristic, with a second queue for successors the relaxed
//!   plan recommended. Fast; plans may be longer than necessary.
//! * `Optimal` ('O'): A* guided by landmark-cut with lazy evaluation and
//!   node reopening (the heuristic is admissible but not consistent, so a
//!   closed node can be rediscovered cheaper).
//!
//! Both are fully deterministic: identical task, solver and budget produce
//! the identical plan. Ground tasks list actions in sorted order and every
//! tie falls back to insertion sequence.
//!
//! `brute_force_optimal` is an independent breadth-first oracle used by the
//! test suite; it refuses tasks larger than its state cap rather than
//! silently chewing memory.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use web_time::Instant;

use crate::ground::{AtomId, BitState, GroundTask, TaskAction};
use crate::heuristics::{csr, HeuristicValue, LmCut, RelaxedEvaluator};
use crate::model::Plan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    /// Greedy best-first search on h_add.
    Satisficing,
    /// A* on landmark-cut.
    Optimal,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Satisficing => "S",
            SolverKind::Optimal => "O",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown solver `{0}`; expected `S` or `O`")]
pub struct ParseSolverError(pub String);

impl FromStr for SolverKind {
    type Err = ParseSolverError;

    fn from_str(s: &str) -> Result<SolverKind, ParseSolverError> {
        match s {
            "S" => Ok(SolverKind::Satisficing),
            "O" => Ok(SolverKind::Optimal),
            other => Err(ParseSolverError(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub expansions: u64,
    pub evaluations: u64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Plan(Plan),
    Unsolvable,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub outcome: SolveOutcome,
    pub stats: SearchStats,
}

impl SolveResult {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.outcome {
            SolveOutcome::Plan(p) => Some(p),
            _ => None,
        }
    }

    pub fn cost(&self) -> Option<u32> {
        self.plan().map(Plan::cost)
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self.outcome, SolveOutcome::Timeout)
    }

    pub fn is_unsolvable(&self) -> bool {
        matches!(self.outcome, SolveOutcome::Unsolvable)
    }
}

const DEAD: u32 = u32::MAX;
/// h not yet computed (the optimal solver evaluates lazily on first pop).
const UNEVAL: u32 = u32::MAX - 1;

struct NodeStore {
    states: Vec<BitState>,
    ids: HashMap<BitState, u32>,
    g: Vec<u32>,
    h: Vec<u32>,
    /// (parent node, action index); the root points at itself.
    parent: Vec<(u32, u32)>,
    closed: Vec<bool>,
}

impl NodeStore {
    fn new(init: BitState) -> NodeStore {
        let mut ids = HashMap::new();
        ids.insert(init.clone(), 0u32);
        NodeStore {
            states: vec![init],
            ids,
            g: vec![0],
            h: vec![0],
            parent: vec![(0, 0)],
            closed: vec![false],
        }
    }

    /// Existing id, or a fresh node with unset h and maximal g.
    fn intern(&mut self, state: BitState) -> (u32, bool) {
        if let Some(&id) = self.ids.get(&state) {
            return (id, false);
        }
        let id = self.states.len() as u32;
        self.ids.insert(state.clone(), id);
        self.states.push(state);
        self.g.push(u32::MAX);
        self.h.push(0);
        self.parent.push((id, 0));
        self.closed.push(false);
        (id, true)
    }

    fn extract(&self, task: &GroundTask, mut node: u32) -> Plan {
        let mut actions: Vec<usize> = Vec::new();
        while self.parent[node as usize].0 != node {
            let (p, a) = self.parent[node as usize];
            actions.push(a as usize);
            node = p;
        }
        actions.reverse();
        task.plan_from(&actions)
    }
}

/// Actions that can contribute to the goal: the fixpoint of "adds an atom
/// that is a goal atom or a precondition of an already-relevant action".
///
/// Preconditions and goals are positive, so making an atom false never helps
/// a plan; an action outside this set only ever adds atoms nothing relevant
/// reads, and deleting every such action from a plan (in one sweep, so their
/// mutual dependencies go with them) leaves a valid plan that is no more
/// expensive. Both solvers therefore search only the relevant actions.
fn relevant_ops(task: &GroundTask) -> Vec<u32> {
    let mut atom_relevant = vec![false; task.num_atoms()];
    for &g in &task.goal {
        atom_relevant[g as usize] = true;
    }
    let mut op_in = vec![false; task.actions.len()];
    loop {
        let mut grew = false;
        for (ai, a) in task.actions.iter().enumerate() {
            if op_in[ai] || !a.add.iter().any(|&x| atom_relevant[x as usize]) {
                continue;
            }
            op_in[ai] = true;
            grew = true;
            for &p in &a.pre {
                atom_relevant[p as usize] = true;
            }
        }
        if !grew {
            break;
        }
    }
    (0..task.actions.len() as u32)
        .filter(|&i| op_in[i as usize])
        .collect()
}

/// Whether two sorted id lists share an element.
fn intersects(xs: &[AtomId], ys: &[AtomId]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Two actions interfere when they cannot be swapped freely: one deletes a
/// precondition of the other (disabling), or one deletes an add effect of
/// the other (their combined outcome depends on the order).
fn interfere(x: &TaskAction, y: &TaskAction) -> bool {
    intersects(&x.del, &y.pre)
        || intersects(&y.del, &x.pre)
        || intersects(&x.del, &y.add)
        || intersects(&y.del, &x.add)
}

/// Successor pruning for the optimal search: strong stubborn sets over the
/// goal-relevant actions.
///
/// In each expanded non-goal state only a "stubborn" subset of the
/// applicable actions spawns successors. The subset is grown so that from
/// this state some cost-minimal plan still starts with a member: it seeds
/// with all achievers of one unsatisfied goal atom (every plan must run
/// one), each inapplicable member pulls in all achievers of one of its
/// unsatisfied preconditions (every plan running the member must first run
/// one of those), and each applicable member pulls in everything it
/// interferes with (actions it cannot be reordered across). Any plan can be
/// permuted so that its first action inside the set moves to the front,
/// which is the classical argument that the pruned space preserves optimal
/// cost. The payoff: interchangeable orderings of independent actions
/// collapse onto one representative instead of a combinatorial plateau.
///
/// Correctness does not depend on which atom each choice point picks, so
/// both pick deterministically (the first unsatisfied atom in list order)
/// to keep searches reproducible.
struct Pruner {
    ops: Vec<u32>,
    /// per atom: relevant actions adding it
    ach_idx: Vec<u32>,
    ach: Vec<u32>,
    /// per action: relevant actions interfering with it
    intf_idx: Vec<u32>,
    intf: Vec<u32>,
    in_set: Vec<bool>,
    touched: Vec<u32>,
    queue: Vec<u32>,
    app_mask: Vec<bool>,
    app: Vec<u32>,
}

impl Pruner {
    fn new(task: &GroundTask) -> Pruner {
        let ops = relevant_ops(task);
        let n_ops = task.actions.len();

        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for &o in &ops {
            for &a in &task.actions[o as usize].add {
                pairs.push((a, o));
            }
        }
        let (ach_idx, ach) = csr(&mut pairs, task.num_atoms());

        pairs.clear();
        for (i, &a) in ops.iter().enumerate() {
            for &b in &ops[i + 1..] {
                if interfere(&task.actions[a as usize], &task.actions[b as usize]) {
                    pairs.push((a, b));
                    pairs.push((b, a));
                }
            }
        }
        let (intf_idx, intf) = csr(&mut pairs, n_ops);

        Pruner {
            ops,
            ach_idx,
            ach,
            intf_idx,
            intf,
            in_set: vec![false; n_ops],
            touched: Vec::new(),
            queue: Vec::new(),
            app_mask: vec![false; n_ops],
            app: Vec::new(),
        }
    }

    fn achievers(&self, atom: AtomId) -> std::ops::Range<usize> {
        self.ach_idx[atom as usize] as usize..self.ach_idx[atom as usize + 1] as usize
    }

    fn enqueue_achievers(&mut self, atom: AtomId) {
        for i in self.achievers(atom) {
            let o = self.ach[i];
            if !self.in_set[o as usize] {
                self.in_set[o as usize] = true;
                self.touched.push(o);
                self.queue.push(o);
            }
        }
    }

    /// The first unsatisfied atom of `atoms` in list order (precondition
    /// lists are ascending by id; the goal list order is fixed at
    /// grounding). Correctness allows any choice; this one is deterministic
    /// and measured well ahead of achiever-count-based picks here.
    fn first_unsatisfied(&self, state: &BitState, atoms: &[AtomId]) -> Option<AtomId> {
        atoms.iter().copied().find(|&p| !state.contains(p))
    }

    /// The applicable actions worth expanding at a non-goal `state`,
    /// ascending. The slice lives in `self` and is valid until the next call.
    fn stubborn_applicable(&mut self, task: &GroundTask, state: &BitState) -> &[u32] {
        self.app.clear();
        for &o in &self.ops {
            if task.applicable(state, o as usize) {
                self.app.push(o);
                self.app_mask[o as usize] = true;
            }
        }
        for &o in &self.touched {
            self.in_set[o as usize] = false;
        }
        self.touched.clear();

        if let Some(g) = self.first_unsatisfied(state, &task.goal) {
            self.enqueue_achievers(g);
        }
        while let Some(o) = self.queue.pop() {
            if self.app_mask[o as usize] {
                for i in self.intf_idx[o as usize] as usize..self.intf_idx[o as usize + 1] as usize {
                    let b = self.intf[i];
                    if !self.in_set[b as usize] {
                        self.in_set[b as usize] = true;
                        self.touched.push(b);
                        self.queue.push(b);
                    }
                }
            } else {
                let q = self
                    .first_unsatisfied(state, &task.actions[o as usize].pre)
                    .expect("inapplicable action has an unsatisfied precondition");
                self.enqueue_achievers(q);
            }
        }

        for i in 0..self.app.len() {
            self.app_mask[self.app[i] as usize] = false;
        }
        let in_set = &self.in_set;
        self.app.retain(|&o| in_set[o as usize]);
        &self.app
    }
}

/// Solve `task` with the given solver within `budget` wall time.
///
/// Outcomes: a plan, a proof of unsolvability (the reachable space or the
/// heuristic rules every path out), or a timeout. The budget is checked
/// every 1024 search operations (pops, evaluations, generation steps);
/// overshoots are normally in the low milliseconds, though a single slow
/// batch (a large node-table rehash) can stretch one check interval.
pub fn solve(task: &GroundTask, kind: SolverKind, budget: Duration) -> SolveResult {
    match kind {
        SolverKind::Satisficing => solve_satisficing(task, budget),
        SolverKind::Optimal => solve_optimal(task, budget),
    }
}

/// Greedy best-first search in the style of strong satisficing planners:
/// nodes are evaluated lazily when popped (one evaluation per expansion, not
/// per generated state), successors are keyed by their parent's relaxed-plan
/// estimate, and successors reached by an action the parent's relaxed plan
/// suggested also enter a second, preferred queue. Pops alternate between
/// the queues, so relaxed-plan guidance gets half the attention without
/// ever starving systematic progress.
fn solve_satisficing(task: &GroundTask, budget: Duration) -> SolveResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let done = |outcome: SolveOutcome, mut stats: SearchStats| -> SolveResult {
        stats.wall_seconds = start.elapsed().as_secs_f64();
        SolveResult { outcome, stats }
    };

    let init = task.init_state();
    // Trivial goals (including the empty goal) never enter the search.
    if task.is_goal(&init) {
        return done(SolveOutcome::Plan(Plan::default()), stats);
    }

    let acts = relevant_ops(task);
    let mut eval = RelaxedEvaluator::new_add(task);
    let mut preferred: Vec<u32> = Vec::new();
    let mut store = NodeStore::new(init);

    // Entries are (parent's h, insertion seq, node); unique seq makes the
    // order total and the search deterministic.
    let mut open: std::collections::BinaryHeap<std::cmp::Reverse<(u32, u64, u32)>> =
        std::collections::BinaryHeap::new();
    let mut open_pref: std::collections::BinaryHeap<std::cmp::Reverse<(u32, u64, u32)>> =
        std::collections::BinaryHeap::new();
    let mut seq: u64 = 0;
    open.push(std::cmp::Reverse((0, seq, 0)));

    let mut ops: u64 = 0;
    macro_rules! tick {
        () => {
            ops += 1;
            if ops % 1024 == 0 && start.elapsed() >= budget {
                return done(SolveOutcome::Timeout, stats);
            }
        };
    }
    if start.elapsed() >= budget {
        return done(SolveOutcome::Timeout, stats);
    }

    let mut from_pref = false;
    loop {
        from_pref = !from_pref;
        let popped = if from_pref {
            open_pref.pop().or_else(|| open.pop())
        } else {
            open.pop().or_else(|| open_pref.pop())
        };
        let Some(std::cmp::Reverse((_, _, node))) = popped else {
            return done(SolveOutcome::Unsolvable, stats);
        };
        tick!();
        let node_us = node as usize;
        if store.closed[node_us] {
            continue;
        }
        store.closed[node_us] = true;

        if task.is_goal(&store.states[node_us]) {
            let plan = store.extract(task, node);
            return done(SolveOutcome::Plan(plan), stats);
        }

        stats.evaluations += 1;
        tick!();
        let hv = match eval.eval_relaxed_plan(task, &store.states[node_us], &mut preferred) {
            // Dead end: the goal is unreachable even ignoring deletes.
            HeuristicValue::Infinite => continue,
            HeuristicValue::Value(v) => v,
        };

        stats.expansions += 1;
        for &ai in &acts {
            tick!();
            let ai = ai as usize;
            if !task.applicable(&store.states[node_us], ai) {
                continue;
            }
            let succ_state = task.apply(&store.states[node_us], ai);
            let (succ, fresh) = store.intern(succ_state);
            if !fresh {
                continue;
            }
            store.g[succ as usize] = store.g[node_us] + 1;
            store.parent[succ as usize] = (node, ai as u32);
            seq += 1;
            open.push(std::cmp::Reverse((hv, seq, succ)));
            if preferred.binary_search(&(ai as u32)).is_ok() {
                seq += 1;
                open_pref.push(std::cmp::Reverse((hv, seq, succ)));
            }
        }
    }
}

/// A* on landmark-cut with lazy evaluation: the (expensive) heuristic runs
/// on a node's first pop, not at generation. Successors enter the queue
/// under the admissible pathmax bound `g + max(h(parent) - 1, 0)` — true
/// cost drops by at most one per unit step — and a popped node whose
/// evaluated f exceeds its popped key is re-queued instead of expanded.
/// Nodes the final f-bound never reaches are never evaluated, and a goal
/// still pops only at the queue minimum, so plans stay provably optimal.
/// The heuristic is admissible but not consistent, so closed nodes reopen
/// when rediscovered cheaper.
fn solve_optimal(task: &GroundTask, budget: Duration) -> SolveResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let done = |outcome: SolveOutcome, mut stats: SearchStats| -> SolveResult {
        stats.wall_seconds = start.elapsed().as_secs_f64();
        SolveResult { outcome, stats }
    };

    let init = task.init_state();
    // Trivial goals (including the empty goal) never enter the search.
    if task.is_goal(&init) {
        return done(SolveOutcome::Plan(Plan::default()), stats);
    }

    let mut eval = LmCut::new(task);
    let mut pruner = Pruner::new(task);
    stats.evaluations += 1;
    let h0 = match eval.eval(task, &init) {
        HeuristicValue::Infinite => return done(SolveOutcome::Unsolvable, stats),
        HeuristicValue::Value(v) => v,
    };

    let mut store = NodeStore::new(init);
    store.h[0] = h0;

    // Priority: (f, h, seq), reversed for a min-heap; among equal f the
    // deeper node goes first, and seq keeps ties in insertion order.
    let mut open: std::collections::BinaryHeap<std::cmp::Reverse<(u32, u32, u64, u32)>> =
        std::collections::BinaryHeap::new();
    let mut seq: u64 = 0;
    open.push(std::cmp::Reverse((h0, h0, seq, 0)));

    let mut ops: u64 = 0;
    macro_rules! tick {
        () => {
            ops += 1;
            if ops % 1024 == 0 && start.elapsed() >= budget {
                return done(SolveOutcome::Timeout, stats);
            }
        };
    }
    if start.elapsed() >= budget {
        return done(SolveOutcome::Timeout, stats);
    }

    while let Some(std::cmp::Reverse((k1, _k2, _seq, node))) = open.pop() {
        tick!();
        let node_us = node as usize;
        if store.closed[node_us] {
            continue;
        }
        let hv = store.h[node_us];
        if hv == UNEVAL {
            stats.evaluations += 1;
            tick!();
            match eval.eval(task, &store.states[node_us]) {
                HeuristicValue::Infinite => {
                    store.h[node_us] = DEAD;
                    store.closed[node_us] = true;
                    continue;
                }
                HeuristicValue::Value(v) => {
                    store.h[node_us] = v;
                    let f = store.g[node_us].saturating_add(v);
                    if f > k1 {
                        // The popped key was only the pathmax bound;
                        // requeue under the real f.
                        seq += 1;
                        open.push(std::cmp::Reverse((f, v, seq, node)));
                        continue;
                    }
                }
            }
        } else if k1 != store.g[node_us].saturating_add(hv) {
            // Stale entry: the node has since been reached cheaper.
            continue;
        }
        store.closed[node_us] = true;

        if task.is_goal(&store.states[node_us]) {
            let plan = store.extract(task, node);
            return done(SolveOutcome::Plan(plan), stats);
        }

        stats.expansions += 1;
        tick!();

        let succs = pruner.stubborn_applicable(task, &store.states[node_us]);
        for &ai in succs {
            tick!();
            let ai = ai as usize;
            let succ_state = task.apply(&store.states[node_us], ai);
            let (succ, fresh) = store.intern(succ_state);
            let succ_us = succ as usize;

            if !fresh && store.h[succ_us] == DEAD {
                continue;
            }
            let tentative = store.g[node_us] + 1;
            if fresh || tentative < store.g[succ_us] {
                store.g[succ_us] = tentative;
                store.parent[succ_us] = (node, ai as u32);
                if fresh {
                    store.h[succ_us] = UNEVAL;
                }
                seq += 1;
                let key = if store.h[succ_us] == UNEVAL {
                    let lb = store.h[node_us].saturating_sub(1);
                    (tentative + lb, lb)
                } else {
                    (tentative + store.h[succ_us], store.h[succ_us])
                };
                // Reopen freely; stale entries are skipped on pop.
                store.closed[succ_us] = false;
                open.push(std::cmp::Reverse((key.0, key.1, seq, succ)));
            }
        }
    }

    done(SolveOutcome::Unsolvable, stats)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("state space exceeds the oracle cap of {cap} states")]
pub struct StateCapExceeded {
    pub cap: usize,
}

/// Exhaustive breadth-first search: returns a provably cost-minimal plan (or
/// proves unsolvability) for unit-cost tasks. Refuses to explore more than
/// `state_cap` distinct states. Independent of the heuristics and the
/// production solvers by construction, which is the point.
pub fn brute_force_optimal(
    task: &GroundTask,
    state_cap: usize,
) -> Result<SolveResult, StateCapExceeded> {
    let start = Instant::now();
    let mut stats = SearchStats::default();

    let init = task.init_state();
    let mut store = NodeStore::new(init);
    let mut queue: VecDeque<u32> = VecDeque::new();
    queue.push_back(0);

    while let Some(node) = queue.pop_front() {
        let node_us = node as usize;
        if task.is_goal(&store.states[node_us]) {
            let plan = store.extract(task, node);
            stats.wall_seconds = start.elapsed().as_secs_f64();
            return Ok(SolveResult {
                outcome: SolveOutcome::Plan(plan),
                stats,
            });
        }
        stats.expansions += 1;
        for ai in 0..task.actions.len() {
            if !task.applicable(&store.states[node_us], ai) {
                continue;
            }
            let succ_state = task.apply(&store.states[node_us], ai);
            let (succ, fresh) = store.intern(succ_state);
            if fresh {
                if store.states.len() > state_cap {
                    return Err(StateCapExceeded { cap: state_cap });
                }
                store.parent[succ as usize] = (node, ai as u32);
                store.g[succ as usize] = store.g[node_us] + 1;
                queue.push_back(succ);
            }
        }
    }

    stats.wall_seconds = start.elapsed().as_secs_f64();
    Ok(SolveResult {
        outcome: SolveOutcome::Unsolvable,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::instantiate;
    use crate::model::{validate, ActionSchema, Atom, Domain, Group, Literal, PredicateSchema, Problem, ValidationOutcome};
    use indexmap::{IndexMap, IndexSet};

    fn prop_task(
        n_atoms: usize,
        actions: &[(&[usize], &[usize], &[usize])],
        init: &[usize],
        goal: &[usize],
    ) -> (Domain, Problem, GroundTask) {
        let mut predicates = IndexMap::new();
        for i in 0..n_atoms {
            let name = format!("p{i}");
            predicates.insert(
                name.clone(),
                PredicateSchema {
                    name,
                    param_types: vec![],
                    group: Group::Elementary,
                    family: "e".into(),
                },
            );
        }
        let mut schemas = IndexMap::new();
        let lit = |i: &usize| Literal::positive(format!("p{i}"), vec![]);
        for (ai, (pre, add, del)) in actions.iter().enumerate() {
            let name = format!("a{ai}");
            schemas.insert(
                name.clone(),
                ActionSchema::new(
                    name.clone(),
                    vec![],
                    pre.iter().map(lit).collect(),
                    add.iter().map(lit).collect(),
                    del.iter().map(lit).collect(),
                ),
            );
        }
        let domain = Domain {
            name: "prop".into(),
            types: IndexSet::new(),
            predicates,
            actions: schemas,
        };
        let atom = |i: &usize| Atom::new(format!("p{i}"), &[]);
        let problem = Problem {
            name: "prop_1".into(),
            domain: "prop".into(),
            objects: IndexMap::new(),
            init: init.iter().map(atom).collect(),
            goal: goal.iter().map(atom).collect(),
        };
        let task = instantiate(&domain, &problem);
        (domain, problem, task)
    }

    const BUDGET: Duration = Duration::from_secs(5);

    #[test]
    fn solver_kind_round_trips() {
        assert_eq!("S".parse::<SolverKind>().unwrap(), SolverKind::Satisficing);
        assert_eq!("O".parse::<SolverKind>().unwrap(), SolverKind::Optimal);
        assert_eq!(SolverKind::Satisficing.to_string(), "S");
        assert_eq!(SolverKind::Optimal.to_string(), "O");
        assert!("x".parse::<SolverKind>().is_err());
    }

    #[test]
    fn trivial_goal_yields_empty_plan() {
        let (_, _, t) = prop_task(2, &[(&[0], &[1], &[])], &[0], &[0]);
        for kind in [SolverKind::Satisficing, SolverKind::Optimal] {
            let r = solve(&t, kind, BUDGET);
            assert_eq!(r.cost(), Some(0));
        }
        let (_, _, t) = prop_task(1, &[], &[0], &[]);
        assert_eq!(solve(&t, SolverKind::Optimal, BUDGET).cost(), Some(0));
    }

    #[test]
    fn chain_is_solved_optimally_by_both() {
        let (_, problem, t) = prop_task(
            4,
            &[(&[0], &[1], &[]), (&[1], &[2], &[]), (&[2], &[3], &[])],
            &[0],
            &[3],
        );
        for kind in [SolverKind::Satisficing, SolverKind::Optimal] {
            let r = solve(&t, kind, BUDGET);
            assert_eq!(r.cost(), Some(3), "{kind}");
            assert!(matches!(
                validate(&problem, r.plan().unwrap()),
                ValidationOutcome::Valid
            ));
        }
    }

    #[test]
    fn optimal_beats_greedy_on_a_trap() {
        // A tempting long route (many cheap-looking atoms) versus a short
        // one; A* must return 2 regardless of what greedy does.
        let (_, _, t) = prop_task(
            6,
            &[
                (&[0], &[1], &[]),
                (&[1], &[2], &[]),
                (&[2], &[5], &[]),
                (&[0], &[4], &[]),
                (&[4], &[5], &[]),
            ],
            &[0],
            &[5],
        );
        let r = solve(&t, SolverKind::Optimal, BUDGET);
        assert_eq!(r.cost(), Some(2));
        let oracle = brute_force_optimal(&t, 10_000).unwrap();
        assert_eq!(oracle.cost(), Some(2));
    }

    #[test]
    fn unsolvable_is_detected_by_exhaustion_and_by_heuristic() {
        // Goal atom never added by anything: the heuristic sees infinity.
        let (_, _, t) = prop_task(3, &[(&[0], &[1], &[])], &[0], &[2]);
        for kind in [SolverKind::Satisficing, SolverKind::Optimal] {
            let r = solve(&t, kind, BUDGET);
            assert!(r.is_unsolvable(), "{kind}");
        }

        // Mutex pair: each action deletes the other's goal atom. Relaxed
        // reachability says "fine", only exhaustion proves it.
        let (_, _, t) = prop_task(
            3,
            &[(&[0], &[1], &[2]), (&[0], &[2], &[1])],
            &[0],
            &[1, 2],
        );
        for kind in [SolverKind::Satisficing, SolverKind::Optimal] {
            let r = solve(&t, kind, BUDGET);
            assert!(r.is_unsolvable(), "{kind}");
            assert!(r.stats.expansions > 0);
        }
    }

    #[test]
    fn timeout_fires_on_zero_budget() {
        let (_, _, t) = prop_task(
            4,
            &[(&[0], &[1], &[]), (&[1], &[2], &[]), (&[2], &[3], &[])],
            &[0],
            &[3],
        );
        let r = solve(&t, SolverKind::Optimal, Duration::ZERO);
        assert!(r.is_timeout());
    }

    #[test]
    fn search_is_deterministic() {
        let (_, _, t) = prop_task(
            6,
            &[
                (&[0], &[1], &[0]),
                (&[0], &[2], &[0]),
                (&[1], &[3], &[]),
                (&[2], &[3], &[]),
                (&[3], &[4], &[]),
                (&[3], &[5], &[]),
            ],
            &[0],
            &[3, 4],
        );
        for kind in [SolverKind::Satisficing, SolverKind::Optimal] {
            let a = solve(&t, kind, BUDGET);
            let b = solve(&t, kind, BUDGET);
            assert_eq!(a.plan(), b.plan(), "{kind}");
            assert_eq!(a.stats.expansions, b.stats.expansions);
        }
    }

    #[test]
    fn oracle_respects_its_cap() {
        // 2^10 reachable states from independent toggles.
        let actions: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> =
            (1..=10).map(|i| (vec![0], vec![i], vec![])).collect();
        let refs: Vec<(&[usize], &[usize], &[usize])> = actions
            .iter()
            .map(|(p, a, d)| (p.as_slice(), a.as_slice(), d.as_slice()))
            .collect();
        let (_, _, t) = prop_task(11, &refs, &[0], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert!(matches!(
            brute_force_optimal(&t, 64),
            Err(StateCapExceeded { cap: 64 })
        ));
        let r = brute_force_optimal(&t, 100_000).unwrap();
        assert_eq!(r.cost(), Some(10));
    }

    /// Random propositional micro-tasks: whatever successor pruning and
    /// lazy-evaluation shortcuts the production solvers take, the optimal
    /// one must match the exhaustive oracle's cost exactly and the
    /// satisficing one must stay complete and never beat it.
    mod random_micro_tasks {
        use super::*;
        use proptest::prelude::*;

        type Spec = (
            usize,
            Vec<(Vec<usize>, Vec<usize>, Vec<usize>)>,
            Vec<usize>,
            Vec<usize>,
        );

        fn spec() -> impl Strategy<Value = Spec> {
            (2usize..=7).prop_flat_map(|n| {
                let subset = || {
                    prop::collection::btree_set(0..n, 0..=3)
                        .prop_map(|s| s.into_iter().collect::<Vec<usize>>())
                };
                let goal = prop::collection::btree_set(0..n, 1..=3)
                    .prop_map(|s| s.into_iter().collect::<Vec<usize>>());
                (
                    Just(n),
                    prop::collection::vec((subset(), subset(), subset()), 1..=9),
                    subset(),
                    goal,
                )
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]
            #[test]
            fn solvers_agree_with_the_oracle((n, actions, init, goal) in spec()) {
                let refs: Vec<(&[usize], &[usize], &[usize])> = actions
                    .iter()
                    .map(|(p, a, d)| (p.as_slice(), a.as_slice(), d.as_slice()))
                    .collect();
                let (_, problem, t) = prop_task(n, &refs, &init, &goal);
                let oracle = brute_force_optimal(&t, 100_000).unwrap();

                let opt = solve(&t, SolverKind::Optimal, BUDGET);
                prop_assert_eq!(opt.cost(), oracle.cost());
                if let Some(p) = opt.plan() {
                    prop_assert!(matches!(validate(&problem, p), ValidationOutcome::Valid));
                }

                let sat = solve(&t, SolverKind::Satisficing, BUDGET);
                prop_assert_eq!(sat.cost().is_some(), oracle.cost().is_some());
                if let (Some(s), Some(o)) = (sat.cost(), oracle.cost()) {
                    prop_assert!(s >= o);
                    prop_assert!(matches!(
                        validate(&problem, sat.plan().unwrap()),
                        ValidationOutcome::Valid
                    ));
                }
            }
        }
    }

    #[test]
    fn oracle_agrees_with_production_solvers_on_a_grid() {
        // Small but nontrivial: three interacting toggles with deletes.
        let (_, problem, t) = prop_task(
            7,
            &[
                (&[0], &[1], &[0]),
                (&[1], &[2], &[1]),
                (&[2], &[0], &[2]),
                (&[0, 2], &[3], &[]),
                (&[1], &[4], &[2]),
                (&[3, 4], &[5], &[]),
                (&[0], &[6], &[3]),
            ],
            &[0],
            &[5],
        );
        let oracle = brute_force_optimal(&t, 100_000).unwrap();
        let opt = solve(&t, SolverKind::Optimal, BUDGET);
        assert_eq!(opt.cost(), oracle.cost());
        let sat = solve(&t, SolverKind::Satisficing, BUDGET);
        match (sat.cost(), oracle.cost()) {
            (Some(s), Some(o)) => {
                assert!(s >= o);
                assert!(matches!(
                    validate(&problem, sat.plan().unwrap()),
                    ValidationOutcome::Valid
                ));
            }
            (a, b) => assert_eq!(a.is_some(), b.is_some()),
        }
    }
}
