//! Delete-relaxation heuristics over ground tasks: the additive and max
//! relaxation estimates, plus a landmark-cut evaluator used by the optimal
//! search track.
//!
//! All evaluators precompute task adjacency once and keep their working
//! buffers between calls, so a search can evaluate thousands of states
//! without reallocating. An evaluator is tied to the task it was built from.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::ground::{AtomId, BitState, GroundTask};

/// Result of a heuristic evaluation: a non-negative estimate, or the proof
/// that no plan exists from the evaluated state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HeuristicValue {
    Value(u32),
    Infinite,
}

impl HeuristicValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, HeuristicValue::Infinite)
    }

    pub fn value(self) -> Option<u32> {
        match self {
            HeuristicValue::Value(v) => Some(v),
            HeuristicValue::Infinite => None,
        }
    }
}

const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Combine {
    Add,
    Max,
}

/// Shared h_add / h_max machinery: a Dijkstra sweep over the relaxed
/// task, combining precondition costs by sum or max.
pub struct RelaxedEvaluator {
    combine: Combine,
    /// atom -> indices of actions having it as a precondition
    pre_of: Vec<Vec<u32>>,
    /// actions with no preconditions at all
    no_pre: Vec<u32>,
    cost: Vec<u32>,
    acc: Vec<u64>,
    remaining: Vec<u32>,
    heap: BinaryHeap<Reverse<(u32, AtomId)>>,
    /// atom -> action that achieved its final cost (NO_ACHIEVER for state
    /// atoms and unreached ones); traces a relaxed plan after the sweep
    achiever: Vec<u32>,
    /// scratch for relaxed-plan extraction
    marked: Vec<bool>,
    chosen: Vec<bool>,
    worklist: Vec<AtomId>,
}

const NO_ACHIEVER: u32 = u32::MAX;

impl RelaxedEvaluator {
    pub fn new_add(task: &GroundTask) -> RelaxedEvaluator {
        RelaxedEvaluator::new(task, Combine::Add)
    }

    pub fn new_max(task: &GroundTask) -> RelaxedEvaluator {
        RelaxedEvaluator::new(task, Combine::Max)
    }

    fn new(task: &GroundTask, combine: Combine) -> RelaxedEvaluator {
        let mut pre_of = vec![Vec::new(); task.num_atoms()];
        let mut no_pre = Vec::new();
        for (ai, a) in task.actions.iter().enumerate() {
            if a.pre.is_empty() {
                no_pre.push(ai as u32);
            }
            for &p in &a.pre {
                pre_of[p as usize].push(ai as u32);
            }
        }
        RelaxedEvaluator {
            combine,
            pre_of,
            no_pre,
            cost: vec![UNREACHED; task.num_atoms()],
            acc: vec![0; task.actions.len()],
            remaining: vec![0; task.actions.len()],
            heap: BinaryHeap::new(),
            achiever: vec![NO_ACHIEVER; task.num_atoms()],
            marked: vec![false; task.num_atoms()],
            chosen: vec![false; task.actions.len()],
            worklist: Vec::new(),
        }
    }

    pub fn eval(&mut self, task: &GroundTask, state: &BitState) -> HeuristicValue {
        debug_assert_eq!(self.cost.len(), task.num_atoms());
        self.cost.fill(UNREACHED);
        self.achiever.fill(NO_ACHIEVER);
        self.acc.fill(0);
        for (ai, a) in task.actions.iter().enumerate() {
            self.remaining[ai] = a.pre.len() as u32;
        }
        self.heap.clear();

        for id in state.iter_ids() {
            self.cost[id as usize] = 0;
            self.heap.push(Reverse((0, id)));
        }
        // Unconditioned actions fire immediately at their own cost.
        for i in 0..self.no_pre.len() {
            let ai = self.no_pre[i] as usize;
            self.fire(task, ai, 0);
        }

        while let Some(Reverse((c, id))) = self.heap.pop() {
            if c > self.cost[id as usize] {
                continue;
            }
            for ai_pos in 0..self.pre_of[id as usize].len() {
                let ai = self.pre_of[id as usize][ai_pos] as usize;
                match self.combine {
                    Combine::Add => self.acc[ai] += c as u64,
                    Combine::Max => self.acc[ai] = self.acc[ai].max(c as u64),
                }
                self.remaining[ai] -= 1;
                if self.remaining[ai] == 0 {
                    let base = self.acc[ai];
                    self.fire(task, ai, base);
                }
            }
        }

        let mut total: u64 = 0;
        for &g in &task.goal {
            let c = self.cost[g as usize];
            if c == UNREACHED {
                return HeuristicValue::Infinite;
            }
            match self.combine {
                Combine::Add => total += c as u64,
                Combine::Max => total = total.max(c as u64),
            }
        }
        HeuristicValue::Value(total.min((UNREACHED - 1) as u64) as u32)
    }

    fn fire(&mut self, task: &GroundTask, ai: usize, base: u64) {
        let value = (base + 1).min((UNREACHED - 1) as u64) as u32;
        for &add in &task.actions[ai].add {
            if value < self.cost[add as usize] {
                self.cost[add as usize] = value;
                self.achiever[add as usize] = ai as u32;
                self.heap.push(Reverse((value, add)));
            }
        }
    }

    /// Relaxed-plan estimate with act-now suggestions. Runs the sweep, then
    /// walks cheapest achievers back from the goal; the estimate is the
    /// number of distinct actions collected (the FF heuristic), a better
    /// plateau-breaker than the raw cost sum. `preferred` receives the
    /// relaxed plan's members that are applicable in `state` right now —
    /// the actions a greedy search should try first.
    pub fn eval_relaxed_plan(
        &mut self,
        task: &GroundTask,
        state: &BitState,
        preferred: &mut Vec<u32>,
    ) -> HeuristicValue {
        preferred.clear();
        if self.eval(task, state).is_infinite() {
            return HeuristicValue::Infinite;
        }

        self.marked.fill(false);
        self.chosen.fill(false);
        self.worklist.clear();
        for &g in &task.goal {
            if self.cost[g as usize] > 0 && !self.marked[g as usize] {
                self.marked[g as usize] = true;
                self.worklist.push(g);
            }
        }
        let mut count: u32 = 0;
        while let Some(atom) = self.worklist.pop() {
            let ai = self.achiever[atom as usize] as usize;
            debug_assert_ne!(ai as u32, NO_ACHIEVER, "positive cost without achiever");
            if self.chosen[ai] {
                continue;
            }
            self.chosen[ai] = true;
            count += 1;
            if task.applicable(state, ai) {
                preferred.push(ai as u32);
            }
            // Each precondition costs strictly less than the achiever's
            // value, so this recursion grounds out at state atoms (cost 0).
            for &p in &task.actions[ai].pre {
                if self.cost[p as usize] > 0 && !self.marked[p as usize] {
                    self.marked[p as usize] = true;
                    self.worklist.push(p);
                }
            }
        }
        preferred.sort_unstable();
        HeuristicValue::Value(count)
    }
}

/// h_add: sum-combined delete relaxation. Inadmissible but a strong guide
/// for greedy search.
pub fn h_add(task: &GroundTask, state: &BitState) -> HeuristicValue {
    RelaxedEvaluator::new_add(task).eval(task, state)
}

/// h_max: max-combined delete relaxation. Admissible, never above h_add.
pub fn h_max(task: &GroundTask, state: &BitState) -> HeuristicValue {
    RelaxedEvaluator::new_max(task).eval(task, state)
}

/// Marker for the precondition-choice of an action with no preconditions:
/// conceptually a virtual always-true atom.
const VIRTUAL_TRUE: u32 = u32::MAX;

/// Landmark-cut evaluator: repeatedly finds a cut of actions that every
/// relaxed plan must cross, charges the cheapest cut member, discounts the
/// cut, and repeats until the (cost-adjusted) h_max of the goal is zero.
/// Admissible, and much tighter than h_max.
///
/// The adjacency lives in flat index/data (CSR) arrays and the h_max sweep
/// runs on a bucket queue — evaluation is the optimal solver's inner loop,
/// and pointer-chasing nested `Vec`s or a binary heap show up directly in
/// its wall time.
pub struct LmCut {
    /// atom -> actions with that precondition (index + data)
    pre_of_idx: Vec<u32>,
    pre_of: Vec<u32>,
    /// atom -> actions adding it
    add_of_idx: Vec<u32>,
    add_of: Vec<u32>,
    /// action -> its add atoms
    adds_idx: Vec<u32>,
    adds: Vec<u32>,
    pre_len: Vec<u32>,
    no_pre: Vec<u32>,
    /// per-action working cost, reset to unit each evaluation
    costs: Vec<u32>,
    cost: Vec<u32>,
    remaining: Vec<u32>,
    /// precondition-choice: the most expensive precondition atom, settled
    /// during the h_max sweep
    supporter: Vec<u32>,
    /// monotone integer priority queue for the sweep
    buckets: Vec<Vec<AtomId>>,
    zone: Vec<bool>,
    before: Vec<bool>,
    in_cut: Vec<bool>,
    cut: Vec<u32>,
    worklist: Vec<u32>,
}

pub(crate) fn csr(pairs: &mut Vec<(u32, u32)>, keys: usize) -> (Vec<u32>, Vec<u32>) {
    pairs.sort_unstable();
    let mut idx = Vec::with_capacity(keys + 1);
    let mut dat = Vec::with_capacity(pairs.len());
    let mut it = pairs.iter().peekable();
    for key in 0..=keys as u32 {
        idx.push(dat.len() as u32);
        while let Some(&&(k, v)) = it.peek() {
            if k != key {
                break;
            }
            dat.push(v);
            it.next();
        }
    }
    (idx, dat)
}

impl LmCut {
    pub fn new(task: &GroundTask) -> LmCut {
        let mut pre_pairs: Vec<(u32, u32)> = Vec::new();
        let mut add_pairs: Vec<(u32, u32)> = Vec::new();
        let mut adds_pairs: Vec<(u32, u32)> = Vec::new();
        let mut pre_len = Vec::with_capacity(task.actions.len());
        let mut no_pre = Vec::new();
        for (ai, a) in task.actions.iter().enumerate() {
            if a.pre.is_empty() {
                no_pre.push(ai as u32);
            }
            pre_len.push(a.pre.len() as u32);
            for &p in &a.pre {
                pre_pairs.push((p, ai as u32));
            }
            for &add in &a.add {
                add_pairs.push((add, ai as u32));
                adds_pairs.push((ai as u32, add));
            }
        }
        let n_atoms = task.num_atoms();
        let n_actions = task.actions.len();
        let (pre_of_idx, pre_of) = csr(&mut pre_pairs, n_atoms);
        let (add_of_idx, add_of) = csr(&mut add_pairs, n_atoms);
        let (adds_idx, adds) = csr(&mut adds_pairs, n_actions);
        LmCut {
            pre_of_idx,
            pre_of,
            add_of_idx,
            add_of,
            adds_idx,
            adds,
            pre_len,
            no_pre,
            costs: vec![1; n_actions],
            cost: vec![UNREACHED; n_atoms],
            remaining: vec![0; n_actions],
            supporter: vec![VIRTUAL_TRUE; n_actions],
            buckets: Vec::new(),
            zone: vec![false; n_atoms],
            before: vec![false; n_atoms],
            in_cut: vec![false; n_actions],
            cut: Vec::new(),
            worklist: Vec::new(),
        }
    }

    #[inline]
    fn pre_of(&self, atom: usize) -> std::ops::Range<usize> {
        self.pre_of_idx[atom] as usize..self.pre_of_idx[atom + 1] as usize
    }

    #[inline]
    fn add_of(&self, atom: usize) -> std::ops::Range<usize> {
        self.add_of_idx[atom] as usize..self.add_of_idx[atom + 1] as usize
    }

    #[inline]
    fn adds(&self, action: usize) -> std::ops::Range<usize> {
        self.adds_idx[action] as usize..self.adds_idx[action + 1] as usize
    }

    /// The cut sequence depends on which max-cost precondition is chosen as
    /// an action's supporter; ties break toward the smallest atom id, which
    /// keeps the estimate independent of sweep order and measures as the
    /// stronger choice under successor pruning on this task family.
    pub fn eval(&mut self, task: &GroundTask, state: &BitState) -> HeuristicValue {
        debug_assert_eq!(self.cost.len(), task.num_atoms());
        self.costs.fill(1);
        let mut total: u32 = 0;

        loop {
            let Some((goal_hmax, goal_pcf)) = self.hmax_sweep(task, state) else {
                return HeuristicValue::Infinite;
            };
            if goal_hmax == 0 {
                return HeuristicValue::Value(total);
            }

            // Goal zone: atoms that still reach the goal for free through
            // the justification graph, seeded by the goal's own choice.
            self.zone.fill(false);
            self.worklist.clear();
            self.zone[goal_pcf as usize] = true;
            self.worklist.push(goal_pcf);
            while let Some(a) = self.worklist.pop() {
                for i in self.add_of(a as usize) {
                    let ai = self.add_of[i] as usize;
                    if self.costs[ai] == 0 && self.remaining[ai] == 0 {
                        let sup = self.supporter[ai];
                        // A zero-cost path all the way to the state would
                        // mean goal_hmax == 0, handled above.
                        debug_assert_ne!(sup, VIRTUAL_TRUE);
                        if sup != VIRTUAL_TRUE && !self.zone[sup as usize] {
                            self.zone[sup as usize] = true;
                            self.worklist.push(sup);
                        }
                    }
                }
            }

            // Sweep forward from the state through precondition-choice
            // edges, stopping at the zone; actions that would step into the
            // zone form the cut.
            self.before.fill(false);
            self.worklist.clear();
            self.cut.clear();
            let mut cut_min = UNREACHED;
            macro_rules! traverse {
                ($ai:expr) => {
                    let ai = $ai;
                    if !self.in_cut[ai] && self.remaining[ai] == 0 {
                        let adds = self.adds(ai);
                        if adds.clone().any(|i| self.zone[self.adds[i] as usize]) {
                            self.in_cut[ai] = true;
                            self.cut.push(ai as u32);
                            cut_min = cut_min.min(self.costs[ai]);
                        } else {
                            for i in adds {
                                let x = self.adds[i];
                                if !self.before[x as usize] && !self.zone[x as usize] {
                                    self.before[x as usize] = true;
                                    self.worklist.push(x);
                                }
                            }
                        }
                    }
                };
            }
            for id in state.iter_ids() {
                if !self.zone[id as usize] && !self.before[id as usize] {
                    self.before[id as usize] = true;
                    self.worklist.push(id);
                }
            }
            // Unconditioned actions hang off the virtual true atom, which is
            // always part of the before-region.
            for i in 0..self.no_pre.len() {
                traverse!(self.no_pre[i] as usize);
            }
            while let Some(a) = self.worklist.pop() {
                for i in self.pre_of(a as usize) {
                    let ai = self.pre_of[i] as usize;
                    if self.supporter[ai] == a {
                        traverse!(ai);
                    }
                }
            }

            debug_assert_ne!(cut_min, UNREACHED, "no cut found with positive h_max");
            if cut_min == UNREACHED {
                return HeuristicValue::Value(total);
            }
            total = total.saturating_add(cut_min);
            for i in 0..self.cut.len() {
                let ai = self.cut[i] as usize;
                self.costs[ai] -= cut_min;
                self.in_cut[ai] = false;
            }
        }
    }

    /// h_max with the current action costs. Returns the goal's value and its
    /// precondition-choice atom, or None if some goal atom is unreachable.
    fn hmax_sweep(&mut self, task: &GroundTask, state: &BitState) -> Option<(u32, AtomId)> {
        self.cost.fill(UNREACHED);
        self.supporter.fill(VIRTUAL_TRUE);
        self.remaining.copy_from_slice(&self.pre_len);
        for b in &mut self.buckets {
            b.clear();
        }

        macro_rules! push {
            ($value:expr, $atom:expr) => {
                let (value, atom) = ($value as usize, $atom);
                if value >= self.buckets.len() {
                    self.buckets.resize_with(value + 1, Vec::new);
                }
                self.buckets[value].push(atom);
            };
        }
        for id in state.iter_ids() {
            self.cost[id as usize] = 0;
            push!(0, id);
        }
        for i in 0..self.no_pre.len() {
            let ai = self.no_pre[i] as usize;
            let value = self.costs[ai];
            for j in self.adds(ai) {
                let add = self.adds[j] as usize;
                if value < self.cost[add] {
                    self.cost[add] = value;
                    push!(value, add as AtomId);
                }
            }
        }

        // Bucketed Dijkstra: action costs are 0 or 1, so levels settle
        // monotonically; relaxations push into the current or next level.
        let mut c = 0;
        while (c as usize) < self.buckets.len() {
            while let Some(id) = self.buckets[c as usize].pop() {
                if c > self.cost[id as usize] {
                    continue;
                }
                for i in self.pre_of(id as usize) {
                    let ai = self.pre_of[i] as usize;
                    // Supporter: the max-cost precondition, smallest atom id
                    // on ties. Spelled out (rather than first-settled-wins)
                    // so the choice is independent of queue pop order.
                    let sup = self.supporter[ai];
                    if sup == VIRTUAL_TRUE
                        || c > self.cost[sup as usize]
                        || (c == self.cost[sup as usize] && id < sup)
                    {
                        self.supporter[ai] = id;
                    }
                    self.remaining[ai] -= 1;
                    if self.remaining[ai] == 0 {
                        let value = c + self.costs[ai];
                        for j in self.adds(ai) {
                            let add = self.adds[j] as usize;
                            if value < self.cost[add] {
                                self.cost[add] = value;
                                push!(value, add as AtomId);
                            }
                        }
                    }
                }
            }
            c += 1;
        }

        let mut goal_hmax = 0u32;
        let mut goal_pcf: Option<AtomId> = None;
        for &g in &task.goal {
            let c = self.cost[g as usize];
            if c == UNREACHED {
                return None;
            }
            match goal_pcf {
                None => {
                    goal_hmax = c;
                    goal_pcf = Some(g);
                }
                Some(_) if c > goal_hmax => {
                    goal_hmax = c;
                    goal_pcf = Some(g);
                }
                _ => {}
            }
        }
        match goal_pcf {
            Some(pcf) => Some((goal_hmax, pcf)),
            // An empty goal is trivially satisfied.
            None => Some((0, 0)),
        }
    }
}

/// Landmark-cut estimate. Admissible; sits between h_max and the true
/// relaxed-plan cost.
pub fn lm_cut(task: &GroundTask, state: &BitState) -> HeuristicValue {
    LmCut::new(task).eval(task, state)
}
