//! Core STRIPS data model: typed domains, lifted action schemas, ground
//! atoms/states, plans, and plan validation.
//!
//! Conventions used throughout the crate:
//! * Variable names are stored without the `?` sigil; `Display` adds it back.
//! * Negation never survives parsing into the model. Preconditions are
//!   positive sets, effects are split into `add` and `del` sets.
//! * States and literal sets are B-tree collections so iteration order (and
//!   therefore everything downstream: grounding, search, output files) is
//!   deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four predicate groups. Every declared predicate belongs to exactly
/// one. Groups drive view construction: a view is (conceptually) a union of
/// groups, with `Required` implicitly part of every view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    Required,
    Elementary,
    Spatial,
    Device,
}

impl Group {
    pub const ALL: [Group; 4] = [
        Group::Required,
        Group::Elementary,
        Group::Spatial,
        Group::Device,
    ];

    /// Keyword used in `.dom` files (`(:groups (required ...) ...)`).
    pub fn keyword(self) -> &'static str {
        match self {
            Group::Required => "required",
            Group::Elementary => "elementary",
            Group::Spatial => "spatial",
            Group::Device => "device",
        }
    }

    /// One-letter symbol used in `.views` files and mix strings.
    pub fn symbol(self) -> &'static str {
        match self {
            Group::Required => "R",
            Group::Elementary => "E",
            Group::Spatial => "S",
            Group::Device => "D",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<Group> {
        Group::ALL.iter().copied().find(|g| g.keyword() == kw)
    }

    pub fn from_symbol(sym: &str) -> Option<Group> {
        Group::ALL.iter().copied().find(|g| g.symbol() == sym)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A declared predicate: name, parameter types, group membership, and the
/// mutual-exclusion family it belongs to (e.g. `hot`/`warm`/`cold` all carry
/// family `temperature`). The family is descriptive metadata; the planner
/// never enforces exclusivity, the action effects do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateSchema {
    pub name: String,
    pub param_types: Vec<String>,
    pub group: Group,
    pub family: String,
}

impl PredicateSchema {
    pub fn arity(&self) -> usize {
        self.param_types.len()
    }
}

/// An argument of a lifted literal: either a schema parameter or an object
/// constant baked into the schema (constants appear in hand-written schemas
/// and in partially ground copies produced between views).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Variable(name.into())
    }

    pub fn obj(name: impl Into<String>) -> Term {
        Term::Constant(name.into())
    }

    pub fn as_variable(&self) -> Option<&str> {
        match self {
            Term::Variable(v) => Some(v),
            Term::Constant(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => write!(f, "?{v}"),
            Term::Constant(c) => f.write_str(c),
        }
    }
}

/// A lifted literal: predicate applied to terms. `negated` is only ever true
/// transiently inside the parser (for `(not ...)` effects); literals stored
/// in schemas are positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub pred: String,
    pub args: Vec<Term>,
    pub negated: bool,
}

impl Literal {
    pub fn positive(pred: impl Into<String>, args: Vec<Term>) -> Literal {
        Literal {
            pred: pred.into(),
            args,
            negated: false,
        }
    }

    /// The set of variable names appearing in this literal.
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_variable)
    }

    /// Substitute variables that appear in `binding` with constants.
    pub fn bind(&self, binding: &BTreeMap<String, String>) -> Literal {
        Literal {
            pred: self.pred.clone(),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Variable(v) => match binding.get(v) {
                        Some(obj) => Term::Constant(obj.clone()),
                        None => t.clone(),
                    },
                    Term::Constant(_) => t.clone(),
                })
                .collect(),
            negated: self.negated,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("(not ")?;
        }
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")?;
        if self.negated {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A lifted action schema.
///
/// `origin` and `binding` track provenance across view rounds: a schema in
/// the original domain has `origin == name` and an empty binding; a partially
/// ground copy produced between views keeps the original's `origin` and
/// records which of the origin's parameters are already fixed to objects.
/// `params` holds only the still-free parameters, in origin order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    /// Free parameters as `(name, type)` pairs, without the `?` sigil.
    pub params: Vec<(String, String)>,
    pub pre: BTreeSet<Literal>,
    pub add: BTreeSet<Literal>,
    pub del: BTreeSet<Literal>,
    pub origin: String,
    pub binding: BTreeMap<String, String>,
}

impl ActionSchema {
    /// A fresh schema that is its own origin.
    pub fn new(
        name: impl Into<String>,
        params: Vec<(String, String)>,
        pre: BTreeSet<Literal>,
        add: BTreeSet<Literal>,
        del: BTreeSet<Literal>,
    ) -> ActionSchema {
        let name = name.into();
        ActionSchema {
            origin: name.clone(),
            name,
            params,
            pre,
            add,
            del,
            binding: BTreeMap::new(),
        }
    }

    /// All literals (preconditions and effects) of the schema.
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.pre.iter().chain(self.add.iter()).chain(self.del.iter())
    }

    /// Partially ground this schema: fix some of its free parameters to
    /// objects, substituting into every literal. The result carries the same
    /// origin, the union of the old binding and `extra`, and keeps any
    /// parameter not mentioned in `extra` free.
    pub fn partially_ground(
        &self,
        name: impl Into<String>,
        extra: &BTreeMap<String, String>,
    ) -> ActionSchema {
        let mut binding = self.binding.clone();
        binding.extend(extra.iter().map(|(k, v)| (k.clone(), v.clone())));
        let params = self
            .params
            .iter()
            .filter(|(p, _)| !extra.contains_key(p))
            .cloned()
            .collect();
        ActionSchema {
            name: name.into(),
            params,
            pre: self.pre.iter().map(|l| l.bind(extra)).collect(),
            add: self.add.iter().map(|l| l.bind(extra)).collect(),
            del: self.del.iter().map(|l| l.bind(extra)).collect(),
            origin: self.origin.clone(),
            binding,
        }
    }
}

/// A planning domain: types, predicates, and action schemas, all keyed by
/// name in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub types: IndexSet<String>,
    pub predicates: IndexMap<String, PredicateSchema>,
    pub actions: IndexMap<String, ActionSchema>,
}

impl Domain {
    /// Names of predicates in `group`, in declaration order.
    pub fn group_members(&self, group: Group) -> Vec<&str> {
        self.predicates
            .values()
            .filter(|p| p.group == group)
            .map(|p| p.name.as_str())
            .collect()
    }

    /// The full predicate name set.
    pub fn predicate_names(&self) -> BTreeSet<String> {
        self.predicates.keys().cloned().collect()
    }
}

/// A ground atom: predicate applied to objects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: &[&str]) -> Atom {
        Atom {
            pred: pred.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A world state: the set of atoms currently true.
pub type State = BTreeSet<Atom>;

/// A planning problem over some domain (referenced by name). Objects may
/// carry several types; `objects` maps each object to its type set, in
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: IndexMap<String, BTreeSet<String>>,
    pub init: State,
    pub goal: BTreeSet<Atom>,
}

impl Problem {
    /// Objects having type `ty`, in declaration order.
    pub fn objects_of_type(&self, ty: &str) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, tys)| tys.contains(ty))
            .map(|(o, _)| o.as_str())
            .collect()
    }
}

/// A fully ground action instance.
///
/// `schema` is the name of the schema it was instantiated from (which may be
/// a partially ground copy like `put_in__2`); `origin` is the underlying
/// original action, and `binding` maps every parameter of the origin to an
/// object. Precondition and effects are ground atom sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    pub origin: String,
    pub binding: BTreeMap<String, String>,
    pub pre: BTreeSet<Atom>,
    pub add: BTreeSet<Atom>,
    pub del: BTreeSet<Atom>,
}

impl GroundAction {
    /// All actions cost one step.
    pub fn cost(&self) -> u32 {
        1
    }

    /// Render this action as a plan-file line: the origin's name followed by
    /// its arguments in the origin's parameter order. Requires `domain` to
    /// recover that order; fails if the origin is unknown or a parameter is
    /// unbound (only fully ground actions can be rendered).
    pub fn to_plan_line(&self, domain: &Domain) -> Result<String, PlanLineError> {
        let origin =
            domain
                .actions
                .get(&self.origin)
                .ok_or_else(|| PlanLineError::UnknownOrigin {
                    origin: self.origin.clone(),
                })?;
        let mut line = self.origin.clone();
        for (p, _) in &origin.params {
            let obj = self
                .binding
                .get(p)
                .ok_or_else(|| PlanLineError::UnboundParameter {
                    origin: self.origin.clone(),
                    param: p.clone(),
                })?;
            line.push(' ');
            line.push_str(obj);
        }
        Ok(line)
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.schema)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanLineError {
    #[error("action origin `{origin}` is not declared in the domain")]
    UnknownOrigin { origin: String },
    #[error("parameter ?{param} of `{origin}` is not bound; only fully ground actions have a plan-file form")]
    UnboundParameter { origin: String, param: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroundLineError {
    #[error("unknown action `{name}`")]
    UnknownAction { name: String },
    #[error("action `{name}` takes {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown object `{object}`")]
    UnknownObject { object: String },
    #[error("object `{object}` is not a {ty} (parameter ?{param} of `{name}`)")]
    TypeMismatch {
        name: String,
        param: String,
        ty: String,
        object: String,
    },
}

/// Instantiate the schema called `name` with concrete arguments, checking
/// arity and parameter types against the problem's objects. This is the
/// inverse of [`GroundAction::to_plan_line`] and is what plan-file validation
/// uses to rebuild ground actions from text.
pub fn ground_schema(
    domain: &Domain,
    problem: &Problem,
    name: &str,
    args: &[&str],
) -> Result<GroundAction, GroundLineError> {
    let schema = domain
        .actions
        .get(name)
        .ok_or_else(|| GroundLineError::UnknownAction {
            name: name.to_string(),
        })?;
    if args.len() != schema.params.len() {
        return Err(GroundLineError::Arity {
            name: name.to_string(),
            expected: schema.params.len(),
            got: args.len(),
        });
    }
    let mut binding = schema.binding.clone();
    for ((param, ty), obj) in schema.params.iter().zip(args) {
        let types = problem
            .objects
            .get(*obj)
            .ok_or_else(|| GroundLineError::UnknownObject {
                object: obj.to_string(),
            })?;
        if !types.contains(ty) {
            return Err(GroundLineError::TypeMismatch {
                name: name.to_string(),
                param: param.clone(),
                ty: ty.clone(),
                object: obj.to_string(),
            });
        }
        binding.insert(param.clone(), obj.to_string());
    }
    let atomize = |lits: &BTreeSet<Literal>| -> BTreeSet<Atom> {
        lits.iter()
            .map(|l| Atom {
                pred: l.pred.clone(),
                args: l
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Constant(c) => c.clone(),
                        Term::Variable(v) => binding
                            .get(v)
                            .expect("every schema variable is a parameter")
                            .clone(),
                    })
                    .collect(),
            })
            .collect()
    };
    let pre = atomize(&schema.pre);
    let add = atomize(&schema.add);
    let del = atomize(&schema.del);
    Ok(GroundAction {
        schema: name.to_string(),
        args: args.iter().map(|a| a.to_string()).collect(),
        origin: schema.origin.clone(),
        binding,
        pre,
        add,
        del,
    })
}

/// A sequence of ground actions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<GroundAction>,
}

impl Plan {
    pub fn new(steps: Vec<GroundAction>) -> Plan {
        Plan { steps }
    }

    pub fn cost(&self) -> u32 {
        self.steps.iter().map(GroundAction::cost).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Render the plan in plan-file form: one action per line.
    pub fn to_plan_lines(&self, domain: &Domain) -> Result<String, PlanLineError> {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&step.to_plan_line(domain)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// True iff every precondition atom of `action` holds in `state`.
pub fn applicable(state: &State, action: &GroundAction) -> bool {
    action.pre.iter().all(|a| state.contains(a))
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("action `{action}` is not applicable: missing {}", missing.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "))]
pub struct ApplyError {
    pub action: String,
    pub missing: Vec<Atom>,
}

/// Apply `action` to `state`: delete `del`, then add `add`. Errors with the
/// missing atoms if the precondition does not hold.
pub fn apply(state: &State, action: &GroundAction) -> Result<State, ApplyError> {
    let missing: Vec<Atom> = action
        .pre
        .iter()
        .filter(|a| !state.contains(*a))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(ApplyError {
            action: action.to_string(),
            missing,
        });
    }
    let mut next = state.clone();
    for a in &action.del {
        next.remove(a);
    }
    for a in &action.add {
        next.insert(a.clone());
    }
    Ok(next)
}

/// Outcome of validating a plan against a problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationOutcome {
    Valid,
    /// The plan breaks at `index` (0-based): that step's precondition does
    /// not hold, with `missing` listing the absent atoms.
    StepNotApplicable { index: usize, missing: Vec<Atom> },
    /// Every step applies but the final state misses some goal atoms.
    GoalUnmet { missing: Vec<Atom> },
}

impl ValidationOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidationOutcome::Valid)
    }
}

impl fmt::Display for ValidationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationOutcome::Valid => f.write_str("valid"),
            ValidationOutcome::StepNotApplicable { index, missing } => {
                write!(f, "step {index} not applicable; missing:")?;
                for a in missing {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
            ValidationOutcome::GoalUnmet { missing } => {
                f.write_str("goal unmet; missing:")?;
                for a in missing {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
        }
    }
}

/// Execute `plan` from the problem's initial state and check that every step
/// applies and the goal holds afterwards.
pub fn validate(problem: &Problem, plan: &Plan) -> ValidationOutcome {
    let mut state = problem.init.clone();
    for (index, step) in plan.steps.iter().enumerate() {
        match apply(&state, step) {
            Ok(next) => state = next,
            Err(e) => {
                return ValidationOutcome::StepNotApplicable {
                    index,
                    missing: e.missing,
                }
            }
        }
    }
    let missing: Vec<Atom> = problem
        .goal
        .iter()
        .filter(|a| !state.contains(*a))
        .cloned()
        .collect();
    if missing.is_empty() {
        ValidationOutcome::Valid
    } else {
        ValidationOutcome::GoalUnmet { missing }
    }
}

/// Strip a plan down to the steps that still earn the goal: repeatedly try
/// dropping one step — cascading away any later step the drop leaves
/// inapplicable — and keep the shorter plan whenever the goal survives.
/// Greedy searches routinely emit shuffle sequences that cancel out, and
/// those inflate every partial-grounding round they steer, so plans are
/// reduced before use. The result is always a valid plan, never longer than
/// the input; cost-minimal plans come back unchanged (every reduction is
/// strictly shorter, and no shorter valid plan exists).
pub fn reduce_plan(problem: &Problem, plan: &Plan) -> Plan {
    let mut steps: Vec<GroundAction> = plan.steps.clone();
    loop {
        let mut shrunk = false;
        for skip in 0..steps.len() {
            let mut state = problem.init.clone();
            let mut kept: Vec<usize> = Vec::with_capacity(steps.len());
            for (j, step) in steps.iter().enumerate() {
                if j != skip && applicable(&state, step) {
                    for a in &step.del {
                        state.remove(a);
                    }
                    for a in &step.add {
                        state.insert(a.clone());
                    }
                    kept.push(j);
                }
            }
            if problem.goal.iter().all(|g| state.contains(g)) {
                steps = kept.iter().map(|&j| steps[j].clone()).collect();
                shrunk = true;
                break;
            }
        }
        if !shrunk {
            break;
        }
    }
    Plan::new(steps)
}
