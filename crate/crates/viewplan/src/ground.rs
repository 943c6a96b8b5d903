//! Grounding: turn a lifted domain + problem into a compact propositional
//! task over integer atom ids and bit-set states.
//!
//! Instantiation runs a reachability fixpoint: starting from the initial
//! state, action schemas are bound by unifying their precondition literals
//! against atoms already known to be reachable (free parameters that never
//! occur in a precondition are enumerated over objects of their type), and
//! each new binding's add effects extend the reachable set. The loop repeats
//! until nothing new appears, so actions whose preconditions can never all
//! hold do not make it into the task at all.
//!
//! The result is deterministic: atom ids follow discovery order (initial
//! state first), the action list is sorted by (schema name, arguments), and
//! delete effects on atoms that can never be true are dropped. Goal atoms
//! always receive ids, even when unreachable; searches detect those as dead
//! ends rather than failing to ground.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use indexmap::IndexSet;

use crate::model::{ActionSchema, Atom, Domain, GroundAction, Plan, Problem, Term};

pub type AtomId = u32;

/// A fixed-size bit set over the task's atom universe, used as the state
/// representation during search.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitState {
    words: Box<[u64]>,
}

impl BitState {
    pub fn new(num_atoms: usize) -> BitState {
        BitState {
            words: vec![0u64; num_atoms.div_ceil(64)].into_boxed_slice(),
        }
    }

    pub fn contains(&self, id: AtomId) -> bool {
        let id = id as usize;
        self.words[id / 64] & (1 << (id % 64)) != 0
    }

    pub fn insert(&mut self, id: AtomId) {
        let id = id as usize;
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn remove(&mut self, id: AtomId) {
        let id = id as usize;
        self.words[id / 64] &= !(1 << (id % 64));
    }

    /// Ids of all atoms set, ascending.
    pub fn iter_ids(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            (0..64)
                .filter(move |b| word & (1 << b) != 0)
                .map(move |b| (w * 64 + b) as AtomId)
        })
    }
}

/// A ground action in task form: integer pre/add/del plus enough provenance
/// to reconstruct a [`GroundAction`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskAction {
    pub schema: String,
    pub args: Vec<String>,
    pub origin: String,
    pub binding: BTreeMap<String, String>,
    pub pre: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

/// A grounded planning task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTask {
    pub atoms: Vec<Atom>,
    pub actions: Vec<TaskAction>,
    pub init: Vec<AtomId>,
    pub goal: Vec<AtomId>,
    index: HashMap<Atom, AtomId>,
}

impl GroundTask {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_id(&self, atom: &Atom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn init_state(&self) -> BitState {
        let mut s = BitState::new(self.num_atoms());
        for &id in &self.init {
            s.insert(id);
        }
        s
    }

    pub fn is_goal(&self, state: &BitState) -> bool {
        self.goal.iter().all(|&g| state.contains(g))
    }

    pub fn applicable(&self, state: &BitState, action: usize) -> bool {
        self.actions[action].pre.iter().all(|&p| state.contains(p))
    }

    /// Apply an (assumed applicable) action: delete, then add.
    pub fn apply(&self, state: &BitState, action: usize) -> BitState {
        let mut next = state.clone();
        for &d in &self.actions[action].del {
            next.remove(d);
        }
        for &a in &self.actions[action].add {
            next.insert(a);
        }
        next
    }

    /// Reconstruct the full ground form of action `idx`.
    pub fn ground_action(&self, idx: usize) -> GroundAction {
        let a = &self.actions[idx];
        let to_atoms = |ids: &[AtomId]| -> BTreeSet<Atom> {
            ids.iter().map(|&i| self.atoms[i as usize].clone()).collect()
        };
        GroundAction {
            schema: a.schema.clone(),
            args: a.args.clone(),
            origin: a.origin.clone(),
            binding: a.binding.clone(),
            pre: to_atoms(&a.pre),
            add: to_atoms(&a.add),
            del: to_atoms(&a.del),
        }
    }

    /// Turn a sequence of action indices into a [`Plan`].
    pub fn plan_from(&self, indices: &[usize]) -> Plan {
        Plan::new(indices.iter().map(|&i| self.ground_action(i)).collect())
    }
}

/// Ground `problem` over `domain`.
///
/// Panics are avoided: schemas referencing unknown predicates/objects cannot
/// occur for parsed inputs, and programmatically built ones are expected to
/// be well formed (this is an internal pipeline step, not a validator).
pub fn instantiate(domain: &Domain, problem: &Problem) -> GroundTask {
    let mut objects_by_type: HashMap<&str, Vec<&str>> = HashMap::new();
    for ty in &domain.types {
        objects_by_type.insert(ty.as_str(), problem.objects_of_type(ty));
    }
    let type_check = |obj: &str, ty: &str| -> bool {
        problem
            .objects
            .get(obj)
            .map_or(false, |tys| tys.contains(ty))
    };

    // Reachable atom universe, seeded with the initial state.
    let mut universe: IndexSet<Atom> = problem.init.iter().cloned().collect();
    // Per-predicate list of universe indices, kept in insertion order.
    let mut by_pred: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, atom) in universe.iter().enumerate() {
        by_pred.entry(atom.pred.clone()).or_default().push(i);
    }

    struct RawAction {
        schema: String,
        args: Vec<String>,
        origin: String,
        binding: BTreeMap<String, String>,
        pre: Vec<Atom>,
        add: Vec<Atom>,
        del: Vec<Atom>,
    }
    let mut raw: Vec<RawAction> = Vec::new();
    let mut seen: HashSet<(usize, Vec<String>)> = HashSet::new();

    loop {
        let mut grew = false;
        // The universe is frozen during a pass; add effects collected below
        // extend it between passes, and the loop runs to fixpoint.
        for (schema_idx, schema) in domain.actions.values().enumerate() {
            let pre_lits: Vec<_> = schema.pre.iter().collect();
            let mut binding: BTreeMap<&str, &str> = BTreeMap::new();

            enumerate(
                schema,
                &pre_lits,
                0,
                &mut binding,
                &universe,
                &by_pred,
                &objects_by_type,
                &type_check,
                &mut |complete: &BTreeMap<&str, &str>| {
                    let args: Vec<String> = schema
                        .params
                        .iter()
                        .map(|(p, _)| complete[p.as_str()].to_string())
                        .collect();
                    if !seen.insert((schema_idx, args.clone())) {
                        return;
                    }
                    let bind_map: BTreeMap<String, String> = schema
                        .params
                        .iter()
                        .map(|(p, _)| (p.clone(), complete[p.as_str()].to_string()))
                        .collect();
                    let ground_lit = |lit: &crate::model::Literal| -> Atom {
                        Atom {
                            pred: lit.pred.clone(),
                            args: lit
                                .args
                                .iter()
                                .map(|t| match t {
                                    Term::Variable(v) => complete[v.as_str()].to_string(),
                                    Term::Constant(c) => c.clone(),
                                })
                                .collect(),
                        }
                    };
                    let pre: Vec<Atom> = schema.pre.iter().map(&ground_lit).collect();
                    let add: Vec<Atom> = schema.add.iter().map(&ground_lit).collect();
                    let del: Vec<Atom> = schema.del.iter().map(&ground_lit).collect();
                    let mut total_binding = schema.binding.clone();
                    total_binding.extend(bind_map);
                    raw.push(RawAction {
                        schema: schema.name.clone(),
                        args,
                        origin: schema.origin.clone(),
                        binding: total_binding,
                        pre,
                        add,
                        del,
                    });
                },
            );
        }

        // Extend the universe with the add effects of everything grounded so
        // far; repeat while that uncovers new atoms.
        for action in &raw {
            for atom in &action.add {
                let (i, fresh) = universe.insert_full(atom.clone());
                if fresh {
                    by_pred.entry(atom.pred.clone()).or_default().push(i);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }

    // Goal atoms always get ids, reachable or not.
    for atom in &problem.goal {
        let (i, fresh) = universe.insert_full(atom.clone());
        if fresh {
            by_pred.entry(atom.pred.clone()).or_default().push(i);
        }
    }

    let atoms: Vec<Atom> = universe.iter().cloned().collect();
    let index: HashMap<Atom, AtomId> = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i as AtomId))
        .collect();

    raw.sort_by(|a, b| (&a.schema, &a.args).cmp(&(&b.schema, &b.args)));
    let actions: Vec<TaskAction> = raw
        .into_iter()
        .map(|r| {
            let to_ids = |atoms_in: &[Atom], keep_known_only: bool| -> Vec<AtomId> {
                let mut ids: Vec<AtomId> = atoms_in
                    .iter()
                    .filter_map(|a| {
                        let id = index.get(a).copied();
                        debug_assert!(keep_known_only || id.is_some());
                        id
                    })
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            };
            TaskAction {
                pre: to_ids(&r.pre, false),
                add: to_ids(&r.add, false),
                // Deletes of atoms that can never become true are no-ops.
                del: to_ids(&r.del, true),
                schema: r.schema,
                args: r.args,
                origin: r.origin,
                binding: r.binding,
            }
        })
        .collect();

    let init: Vec<AtomId> = problem.init.iter().map(|a| index[a]).collect();
    let goal: Vec<AtomId> = problem.goal.iter().map(|a| index[a]).collect();

    GroundTask {
        atoms,
        actions,
        init,
        goal,
        index,
    }
}

/// Backtracking unification of `lits[li..]` against the reachable universe.
#[allow(clippy::too_many_arguments)]
fn enumerate<'a>(
    schema: &'a ActionSchema,
    lits: &[&'a crate::model::Literal],
    li: usize,
    binding: &mut BTreeMap<&'a str, &'a str>,
    universe: &'a IndexSet<Atom>,
    by_pred: &HashMap<String, Vec<usize>>,
    objects_by_type: &HashMap<&str, Vec<&'a str>>,
    type_check: &impl Fn(&str, &str) -> bool,
    on_complete: &mut impl FnMut(&BTreeMap<&str, &str>),
) {
    if li == lits.len() {
        // Enumerate parameters that no precondition literal constrained.
        let free: Vec<&(String, String)> = schema
            .params
            .iter()
            .filter(|(p, _)| !binding.contains_key(p.as_str()))
            .collect();
        enumerate_free(&free, 0, binding, objects_by_type, on_complete);
        return;
    }
    let lit = lits[li];
    let Some(indices) = by_pred.get(&lit.pred) else {
        return;
    };
    for &atom_idx in indices {
        let atom = universe.get_index(atom_idx).unwrap();
        let mut bound_here: Vec<&str> = Vec::new();
        let mut ok = true;
        for (term, obj) in lit.args.iter().zip(atom.args.iter()) {
            match term {
                Term::Constant(c) => {
                    if c != obj {
                        ok = false;
                        break;
                    }
                }
                Term::Variable(v) => match binding.get(v.as_str()) {
                    Some(&bound) => {
                        if bound != obj.as_str() {
                            ok = false;
                            break;
                        }
                    }
                    None => {
                        let ty = schema
                            .params
                            .iter()
                            .find(|(p, _)| p == v)
                            .map(|(_, t)| t.as_str());
                        match ty {
                            Some(ty) if type_check(obj, ty) => {
                                binding.insert(v.as_str(), obj.as_str());
                                bound_here.push(v.as_str());
                            }
                            _ => {
                                ok = false;
                                break;
                            }
                        }
                    }
                },
            }
        }
        if ok {
            enumerate(
                schema,
                lits,
                li + 1,
                binding,
                universe,
                by_pred,
                objects_by_type,
                type_check,
                on_complete,
            );
        }
        for v in bound_here {
            binding.remove(v);
        }
    }
}

fn enumerate_free<'a>(
    free: &[&'a (String, String)],
    fi: usize,
    binding: &mut BTreeMap<&'a str, &'a str>,
    objects_by_type: &HashMap<&str, Vec<&'a str>>,
    on_complete: &mut impl FnMut(&BTreeMap<&str, &str>),
) {
    if fi == free.len() {
        on_complete(binding);
        return;
    }
    let (p, ty) = free[fi];
    let Some(objs) = objects_by_type.get(ty.as_str()) else {
        return;
    };
    for obj in objs {
        binding.insert(p.as_str(), obj);
        enumerate_free(free, fi + 1, binding, objects_by_type, on_complete);
        binding.remove(p.as_str());
    }
}

/// Delete-relaxation reachability: the set of atoms that can ever become
/// true if deletes are ignored. Useful for diagnosing dead-end tasks.
pub fn relaxed_reachable_atoms(task: &GroundTask) -> BTreeSet<Atom> {
    let mut reached = vec![false; task.num_atoms()];
    for &i in &task.init {
        reached[i as usize] = true;
    }
    let mut remaining: Vec<usize> = task.actions.iter().map(|a| a.pre.len()).collect();
    let mut fired = vec![false; task.actions.len()];
    // Seed counts.
    for (ai, a) in task.actions.iter().enumerate() {
        remaining[ai] = a.pre.iter().filter(|&&p| !reached[p as usize]).count();
    }
    let mut changed = true;
    while changed {
        changed = false;
        for (ai, a) in task.actions.iter().enumerate() {
            if fired[ai] || remaining[ai] > 0 {
                continue;
            }
            fired[ai] = true;
            for &add in &a.add {
                if !reached[add as usize] {
                    reached[add as usize] = true;
                    changed = true;
                    for (bi, b) in task.actions.iter().enumerate() {
                        if !fired[bi] && b.pre.contains(&add) {
                            remaining[bi] -= 1;
                        }
                    }
                }
            }
        }
    }
    task.atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| reached[*i])
        .map(|(_, a)| a.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_domain, parse_problem};
    use std::collections::BTreeMap;

    const DOM: &str = "
(define (domain toy)
  (:types obj spot)
  (:predicates
    (at ?x - obj ?y - spot)
    (clear ?x - spot)
    (shiny ?x - obj)
    (lit ?x - spot))
  (:groups
    (required shiny)
    (elementary clear)
    (spatial at)
    (device lit))
  (:action move
    :parameters (?o - obj ?a - spot ?b - spot)
    :precondition (and (at ?o ?a) (clear ?b))
    :effect (and (at ?o ?b) (clear ?a) (not (at ?o ?a)) (not (clear ?b)))))
";

    const PROB: &str = "
(define (problem toy_1)
  (:domain toy)
  (:objects
    ball - obj
    left right - spot)
  (:init
    (at ball left)
    (clear right)
    (shiny ball))
  (:goal (and (at ball right))))
";

    fn task() -> GroundTask {
        let d = parse_domain(DOM).unwrap();
        let p = parse_problem(PROB, &d).unwrap();
        instantiate(&d, &p)
    }

    #[test]
    fn grounds_only_reachable_bindings() {
        let t = task();
        // Pass one sees only move(ball,left,right); its add effects put
        // at(ball,right) and clear(left) into the universe, and with both
        // spots occupiable and clearable every (a, b) pair unifies — the
        // self-moves included, even though no real state ever satisfies
        // their preconditions.
        assert_eq!(t.actions.len(), 4);
        let names: Vec<String> = t
            .actions
            .iter()
            .map(|a| format!("{} {}", a.schema, a.args.join(" ")))
            .collect();
        assert_eq!(
            names,
            [
                "move ball left left",
                "move ball left right",
                "move ball right left",
                "move ball right right",
            ]
        );
        // Universe: 3 init atoms + at(ball,right) + clear(left). The lit
        // predicate never becomes reachable.
        assert_eq!(t.num_atoms(), 5);
    }

    #[test]
    fn apply_and_goal_work_on_bitstates() {
        let t = task();
        let s0 = t.init_state();
        assert!(!t.is_goal(&s0));
        // Actions sort by args, so index 0 is the self-move
        // move(ball,left,left), inapplicable while clear(left) is false;
        // index 1 is move(ball,left,right), the real first step.
        assert!(!t.applicable(&s0, 0));
        assert!(t.applicable(&s0, 1));
        let s1 = t.apply(&s0, 1);
        assert!(t.is_goal(&s1));
        // shiny(ball) persists.
        let shiny = t.atom_id(&Atom::new("shiny", &["ball"])).unwrap();
        assert!(s1.contains(shiny));
    }

    #[test]
    fn unreachable_goal_atoms_still_get_ids() {
        let d = parse_domain(DOM).unwrap();
        let text = PROB.replace("(and (at ball right))", "(and (lit left))");
        let p = parse_problem(&text, &d).unwrap();
        let t = instantiate(&d, &p);
        let lit = t.atom_id(&Atom::new("lit", &["left"])).unwrap();
        assert!(!t.init_state().contains(lit));
        assert!(!t.is_goal(&t.init_state()));
    }

    #[test]
    fn partially_ground_copies_restrict_instantiation() {
        let d = parse_domain(DOM).unwrap();
        let p = parse_problem(PROB, &d).unwrap();
        let mut d2 = d.clone();
        let extra: BTreeMap<String, String> =
            [("b".to_string(), "right".to_string())].into();
        let copy = d.actions["move"].partially_ground("move__0", &extra);
        d2.actions.clear();
        d2.actions.insert("move__0".into(), copy);
        let t = instantiate(&d2, &p);
        // Pinning ?b = right leaves ?a free: the start position and, once
        // the first move's effects land, right itself (the self-move).
        // Without the pin the full schema grounds four ways.
        assert_eq!(t.actions.len(), 2);
        let a = &t.actions[0];
        assert_eq!(a.schema, "move__0");
        assert_eq!(a.origin, "move");
        assert_eq!(a.args, ["ball", "left"]); // only the free params
        assert_eq!(
            a.binding,
            [
                ("a".to_string(), "left".to_string()),
                ("b".to_string(), "right".to_string()),
                ("o".to_string(), "ball".to_string()),
            ]
            .into()
        );
        assert_eq!(t.actions[1].args, ["ball", "right"]);
    }

    #[test]
    fn plan_reconstruction_round_trips_through_model() {
        let t = task();
        let plan = t.plan_from(&[1]);
        assert_eq!(plan.len(), 1);
        let step = &plan.steps[0];
        assert_eq!(step.schema, "move");
        assert!(step.pre.contains(&Atom::new("at", &["ball", "left"])));
        assert!(step.add.contains(&Atom::new("at", &["ball", "right"])));
        assert!(step.del.contains(&Atom::new("clear", &["right"])));
    }

    #[test]
    fn relaxed_reachability_covers_both_positions() {
        let t = task();
        let reach = relaxed_reachable_atoms(&t);
        assert!(reach.contains(&Atom::new("at", &["ball", "left"])));
        assert!(reach.contains(&Atom::new("at", &["ball", "right"])));
        assert!(reach.contains(&Atom::new("clear", &["left"])));
        assert!(!reach.iter().any(|a| a.pred == "lit"));
    }

    #[test]
    fn instantiation_is_deterministic() {
        let a = task();
        let b = task();
        assert_eq!(a, b);
        assert_eq!(format!("{:?}", a.actions), format!("{:?}", b.actions));
    }

    #[test]
    fn bitstate_iter_ids_matches_contents() {
        let mut s = BitState::new(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        let ids: Vec<AtomId> = s.iter_ids().collect();
        assert_eq!(ids, [0, 64, 129]);
        s.remove(64);
        let ids: Vec<AtomId> = s.iter_ids().collect();
        assert_eq!(ids, [0, 129]);
    }
}
