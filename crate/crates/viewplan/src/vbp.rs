//! Planning through a stack of views.
//!
//! A view is a keep-set of predicates. Filtering a problem to a view strips
//! every literal over predicates outside the keep-set from action schemas,
//! the initial state and the goal; actions left without any effect vanish
//! from the view entirely. Solving the sequence of progressively larger
//! views, the plan found in view n guides a partial grounding step
//! (`modify`) before view n+1:
//!
//! * every plan step stamps its argument binding onto the *original* schema
//!   it descends from, producing a copy (`origin__k`) whose view-n-visible
//!   parameters are fixed and whose hidden parameters stay free — one copy
//!   per distinct accumulated binding;
//! * schemas whose origin has never been handed to a solver yet are
//!   reintroduced whole;
//! * schemas that have been considered by some view but contributed no plan
//!   step die out.
//!
//! Each round filters the *original* initial state and goal (views grow, so
//! the later views re-reveal what earlier ones hid) but the *working* action
//! set from the previous round. The required predicate group is implicitly
//! part of every view. A failed view fails the run — there is no
//! backtracking or re-planning across views.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ground::instantiate;
use crate::model::{reduce_plan, validate, ActionSchema, Domain, Group, Plan, Problem};
use crate::parser::ViewSpec;
use crate::search::{solve, SolveOutcome, SolveResult, SolverKind};

/// One solver choice per view, e.g. `OSO` = optimal, satisficing, optimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerMix(pub Vec<SolverKind>);

impl PlannerMix {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn kinds(&self) -> &[SolverKind] {
        &self.0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid mix character `{0}`; a mix is a string of `S` and `O`")]
pub struct ParseMixError(pub char);

impl FromStr for PlannerMix {
    type Err = ParseMixError;

    fn from_str(s: &str) -> Result<PlannerMix, ParseMixError> {
        if s.is_empty() {
            return Err(ParseMixError(' '));
        }
        s.chars()
            .map(|c| match c {
                'S' => Ok(SolverKind::Satisficing),
                'O' => Ok(SolverKind::Optimal),
                other => Err(ParseMixError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PlannerMix)
    }
}

impl fmt::Display for PlannerMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in &self.0 {
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VbpError {
    #[error("mix has {mix} solvers but the view stack has {views} views")]
    MixLengthMismatch { mix: usize, views: usize },
    #[error("view keep-set is missing required predicates: {}", missing.join(" "))]
    MissingRequired { missing: Vec<String> },
    #[error("view keep-set names unknown predicate `{pred}`")]
    UnknownKeepPredicate { pred: String },
    #[error("plan step descends from `{origin}`, which is not an original action")]
    UnknownOrigin { origin: String },
}

/// Restrict a schema to the predicates in `keep`.
///
/// Preconditions and effects lose all literals over hidden predicates;
/// parameters that no longer occur in any literal are dropped. Returns
/// `None` when no effect at all survives — such an action cannot matter
/// inside the view. Name, origin and binding are preserved.
pub fn filter_action(action: &ActionSchema, keep: &BTreeSet<String>) -> Option<ActionSchema> {
    let restrict = |lits: &BTreeSet<crate::model::Literal>| -> BTreeSet<crate::model::Literal> {
        lits.iter().filter(|l| keep.contains(&l.pred)).cloned().collect()
    };
    let pre = restrict(&action.pre);
    let add = restrict(&action.add);
    let del = restrict(&action.del);
    if add.is_empty() && del.is_empty() {
        return None;
    }
    let used: BTreeSet<&str> = pre
        .iter()
        .chain(add.iter())
        .chain(del.iter())
        .flat_map(|l| l.variables())
        .collect();
    let params = action
        .params
        .iter()
        .filter(|(p, _)| used.contains(p.as_str()))
        .cloned()
        .collect();
    Some(ActionSchema {
        name: action.name.clone(),
        params,
        pre,
        add,
        del,
        origin: action.origin.clone(),
        binding: action.binding.clone(),
    })
}

/// Restrict a whole domain + problem to the predicates in `keep`.
///
/// The keep-set must name declared predicates and must contain the entire
/// required group (the run driver unions it in automatically; direct callers
/// get an error instead of a silently broken view).
pub fn filter_problem(
    domain: &Domain,
    problem: &Problem,
    keep: &BTreeSet<String>,
) -> Result<(Domain, Problem), VbpError> {
    for pred in keep {
        if !domain.predicates.contains_key(pred) {
            return Err(VbpError::UnknownKeepPredicate { pred: pred.clone() });
        }
    }
    let missing: Vec<String> = domain
        .group_members(Group::Required)
        .into_iter()
        .filter(|p| !keep.contains(*p))
        .map(String::from)
        .collect();
    if !missing.is_empty() {
        return Err(VbpError::MissingRequired { missing });
    }

    let predicates = domain
        .predicates
        .iter()
        .filter(|(name, _)| keep.contains(*name))
        .map(|(n, p)| (n.clone(), p.clone()))
        .collect();
    let actions = domain
        .actions
        .values()
        .filter_map(|a| filter_action(a, keep))
        .map(|a| (a.name.clone(), a))
        .collect();
    let filtered_domain = Domain {
        name: domain.name.clone(),
        types: domain.types.clone(),
        predicates,
        actions,
    };
    let filtered_problem = Problem {
        name: problem.name.clone(),
        domain: problem.domain.clone(),
        objects: problem.objects.clone(),
        init: problem.init.iter().filter(|a| keep.contains(&a.pred)).cloned().collect(),
        goal: problem.goal.iter().filter(|a| keep.contains(&a.pred)).cloned().collect(),
    };
    Ok((filtered_domain, filtered_problem))
}

/// Rebuild the working action set from a view's plan.
///
/// Step 1: each plan step partially grounds the original schema it descends
/// from with the step's accumulated binding (the binding a ground action
/// carries is exactly the view copy's prior binding plus the arguments the
/// view bound). One copy per distinct binding per origin, named `origin__k`
/// with `k` indexing the sorted bindings.
///
/// Step 2: originals whose name is not in `considered` (never handed to any
/// solver yet) are reintroduced whole. Considered originals without plan
/// steps disappear.
pub fn modify(
    originals: &IndexMap<String, ActionSchema>,
    plan: &Plan,
    considered: &BTreeSet<String>,
) -> Result<IndexMap<String, ActionSchema>, VbpError> {
    let mut bindings: BTreeMap<&str, BTreeSet<BTreeMap<String, String>>> = BTreeMap::new();
    for step in &plan.steps {
        if !originals.contains_key(&step.origin) {
            return Err(VbpError::UnknownOrigin {
                origin: step.origin.clone(),
            });
        }
        bindings
            .entry(step.origin.as_str())
            .or_default()
            .insert(step.binding.clone());
    }

    let mut out: IndexMap<String, ActionSchema> = IndexMap::new();
    for (name, original) in originals {
        if let Some(binds) = bindings.get(name.as_str()) {
            for (k, binding) in binds.iter().enumerate() {
                let copy_name = format!("{name}__{k}");
                let copy = original.partially_ground(&copy_name, binding);
                out.insert(copy_name, copy);
            }
        } else if !considered.contains(name) {
            out.insert(name.clone(), original.clone());
        }
    }
    Ok(out)
}

/// Record of a single view round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewRecord {
    /// 1-based view index.
    pub view: usize,
    pub solver: SolverKind,
    /// Number of action schemas in the filtered view (after copies and
    /// reintroduction).
    pub action_count: usize,
    pub result: SolveResult,
}

/// Outcome of a full multi-view run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VbpRun {
    pub records: Vec<ViewRecord>,
    /// Origins handed to a solver in any view.
    pub considered: BTreeSet<String>,
    /// The last view's result: the final plan on success, or the failing
    /// view's result otherwise.
    pub final_result: SolveResult,
}

impl VbpRun {
    pub fn final_plan(&self) -> Option<&Plan> {
        self.final_result.plan()
    }

    /// The 1-based index of the view that failed, if any.
    pub fn failed_view(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.result.plan().is_none())
            .map(|r| r.view)
    }

    pub fn total_wall_seconds(&self) -> f64 {
        self.records.iter().map(|r| r.result.stats.wall_seconds).sum()
    }
}

/// Solve `problem` through the view stack with one solver per view.
///
/// Every round filters the original initial state and goal to the round's
/// keep-set (with the required group always included) but carries the
/// working action set forward through `modify`. A view that times out or
/// proves its filtered problem unsolvable ends the run with that outcome —
/// failures are not papered over by replanning.
pub fn run(
    domain: &Domain,
    problem: &Problem,
    views: &ViewSpec,
    mix: &PlannerMix,
    budget_per_view: Duration,
) -> Result<VbpRun, VbpError> {
    if mix.len() != views.len() {
        return Err(VbpError::MixLengthMismatch {
            mix: mix.len(),
            views: views.len(),
        });
    }
    let required: Vec<String> = domain
        .group_members(Group::Required)
        .into_iter()
        .map(String::from)
        .collect();

    let mut working: IndexMap<String, ActionSchema> = domain.actions.clone();
    let mut considered: BTreeSet<String> = BTreeSet::new();
    let mut records: Vec<ViewRecord> = Vec::new();
    let n = views.len();

    for (i, kind) in mix.kinds().iter().enumerate() {
        let mut keep: BTreeSet<String> = views.view(i).iter().cloned().collect();
        keep.extend(required.iter().cloned());

        let working_domain = Domain {
            name: domain.name.clone(),
            types: domain.types.clone(),
            predicates: domain.predicates.clone(),
            actions: working.clone(),
        };
        let (view_domain, view_problem) = filter_problem(&working_domain, problem, &keep)?;
        let task = instantiate(&view_domain, &view_problem);
        let mut result = solve(&task, *kind, budget_per_view);
        // Satisficing detours would multiply into spurious copies at the
        // next grounding round; shed them while the view problem is at hand.
        if let SolveOutcome::Plan(p) = &mut result.outcome {
            *p = reduce_plan(&view_problem, p);
        }
        records.push(ViewRecord {
            view: i + 1,
            solver: *kind,
            action_count: view_domain.actions.len(),
            result: result.clone(),
        });

        match &result.outcome {
            SolveOutcome::Plan(plan) => {
                considered.extend(view_domain.actions.values().map(|a| a.origin.clone()));
                if i + 1 < n {
                    working = modify(&domain.actions, plan, &considered)?;
                }
            }
            SolveOutcome::Unsolvable | SolveOutcome::Timeout => {
                return Ok(VbpRun {
                    records,
                    considered,
                    final_result: result,
                });
            }
        }
    }

    let final_result = records.last().expect("views are never empty").result.clone();
    debug_assert!(
        final_result
            .plan()
            .map_or(true, |p| validate(problem, p).is_valid()),
        "final view plan must be valid for the unfiltered problem"
    );
    Ok(VbpRun {
        records,
        considered,
        final_result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Literal, Term, ValidationOutcome};
    use crate::parser::{parse_domain, parse_problem, parse_views};
    use proptest::prelude::*;

    const DOM: &str = "
(define (domain toy)
  (:types obj spot)
  (:predicates
    (at ?x - obj ?y - spot)
    (clear ?x - spot)
    (tracked ?x - obj)
    (lit ?x - spot))
  (:groups
    (required tracked)
    (elementary clear)
    (spatial at)
    (device lit))
  (:action move
    :parameters (?o - obj ?a - spot ?b - spot)
    :precondition (and (at ?o ?a) (clear ?b))
    :effect (and (at ?o ?b) (clear ?a) (not (at ?o ?a)) (not (clear ?b))))
  (:action ignite
    :parameters (?o - obj ?s - spot)
    :precondition (and (at ?o ?s))
    :effect (and (lit ?s))))
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
    (tracked ball))
  (:goal (and (clear left))))
";

    fn setup() -> (Domain, Problem) {
        let d = parse_domain(DOM).unwrap();
        let p = parse_problem(PROB, &d).unwrap();
        (d, p)
    }

    fn keep(preds: &[&str]) -> BTreeSet<String> {
        preds.iter().map(|s| s.to_string()).collect()
    }

    const BUDGET: Duration = Duration::from_secs(5);

    #[test]
    fn mix_parsing_round_trips() {
        let mix: PlannerMix = "OSO".parse().unwrap();
        assert_eq!(
            mix.kinds(),
            [
                SolverKind::Optimal,
                SolverKind::Satisficing,
                SolverKind::Optimal
            ]
        );
        assert_eq!(mix.to_string(), "OSO");
        assert!(matches!("OXO".parse::<PlannerMix>(), Err(ParseMixError('X'))));
        assert!("".parse::<PlannerMix>().is_err());
    }

    #[test]
    fn filter_drops_hidden_literals_and_unused_params() {
        let (d, _) = setup();
        let filtered = filter_action(&d.actions["move"], &keep(&["clear", "tracked"])).unwrap();
        // Spatial literals are gone; only the clear-juggling remains.
        assert_eq!(filtered.pre.len(), 1);
        assert!(filtered
            .pre
            .contains(&Literal::positive("clear", vec![Term::var("b")])));
        assert_eq!(filtered.add.len(), 1);
        assert_eq!(filtered.del.len(), 1);
        // ?o occurs only in spatial literals, so it is dropped.
        assert_eq!(
            filtered.params,
            vec![
                ("a".to_string(), "spot".to_string()),
                ("b".to_string(), "spot".to_string())
            ]
        );
        assert_eq!(filtered.name, "move");
        assert_eq!(filtered.origin, "move");
    }

    #[test]
    fn filter_removes_actions_with_no_surviving_effect() {
        let (d, _) = setup();
        // ignite only affects the device predicate; hide it and the action
        // has nothing left to say.
        assert!(filter_action(&d.actions["ignite"], &keep(&["clear", "at", "tracked"])).is_none());
        // Keeping the full set keeps the schema intact.
        let full = d.predicate_names();
        assert_eq!(
            filter_action(&d.actions["ignite"], &full).as_ref(),
            Some(&d.actions["ignite"])
        );
    }

    #[test]
    fn filter_problem_requires_the_required_group() {
        let (d, p) = setup();
        let err = filter_problem(&d, &p, &keep(&["clear"])).unwrap_err();
        assert_eq!(
            err,
            VbpError::MissingRequired {
                missing: vec!["tracked".to_string()]
            }
        );
        assert!(matches!(
            filter_problem(&d, &p, &keep(&["clear", "tracked", "nope"])),
            Err(VbpError::UnknownKeepPredicate { .. })
        ));

        let (fd, fp) = filter_problem(&d, &p, &keep(&["clear", "tracked"])).unwrap();
        assert_eq!(fd.predicates.len(), 2);
        assert!(fp.init.iter().all(|a| a.pred == "clear" || a.pred == "tracked"));
        assert_eq!(fp.goal.len(), 1); // (clear left) survives
    }

    #[test]
    fn modify_dedups_names_and_reintroduces() {
        let (d, p) = setup();
        // View 1 = R+E: move survives (params a, b), ignite is removed.
        let view_keep = keep(&["clear", "tracked"]);
        let (vd, vp) = filter_problem(&d, &p, &view_keep).unwrap();
        let task = instantiate(&vd, &vp);
        let result = solve(&task, SolverKind::Optimal, BUDGET);
        let plan = result.plan().unwrap().clone();
        assert_eq!(plan.len(), 1);
        let step = &plan.steps[0];
        assert_eq!(step.origin, "move");
        assert_eq!(
            step.binding,
            [
                ("a".to_string(), "left".to_string()),
                ("b".to_string(), "right".to_string())
            ]
            .into()
        );

        // Considered: only move was in the view.
        let considered = keep(&["move"]);
        let working = modify(&d.actions, &plan, &considered).unwrap();
        // One copy of move, and ignite reintroduced whole.
        assert_eq!(working.len(), 2);
        let copy = &working["move__0"];
        assert_eq!(copy.origin, "move");
        assert_eq!(copy.params, vec![("o".to_string(), "obj".to_string())]);
        assert!(copy
            .pre
            .contains(&Literal::positive("at", vec![Term::var("o"), Term::obj("left")])));
        assert_eq!(working["ignite"], d.actions["ignite"]);

        // Duplicate steps with the same binding collapse to one copy.
        let mut doubled = plan.clone();
        doubled.steps.push(plan.steps[0].clone());
        let working2 = modify(&d.actions, &doubled, &considered).unwrap();
        assert_eq!(working2.len(), 2);

        // A considered origin with no plan steps dies out.
        let considered_all = keep(&["move", "ignite"]);
        let working3 = modify(&d.actions, &plan, &considered_all).unwrap();
        assert_eq!(working3.len(), 1);
        assert!(working3.contains_key("move__0"));
    }

    #[test]
    fn modify_numbers_copies_in_sorted_binding_order() {
        let (d, _) = setup();
        let mk_step = |a: &str, b: &str| crate::model::GroundAction {
            schema: "move".into(),
            args: vec!["ball".into(), a.into(), b.into()],
            origin: "move".into(),
            binding: [
                ("a".to_string(), a.to_string()),
                ("b".to_string(), b.to_string()),
                ("o".to_string(), "ball".to_string()),
            ]
            .into(),
            pre: BTreeSet::new(),
            add: BTreeSet::new(),
            del: BTreeSet::new(),
        };
        // Insert in reverse order; numbering must follow sorted bindings.
        let plan = Plan::new(vec![mk_step("right", "left"), mk_step("left", "right")]);
        let working = modify(&d.actions, &plan, &keep(&["move", "ignite"])).unwrap();
        assert_eq!(working.len(), 2);
        let c0 = &working["move__0"];
        let c1 = &working["move__1"];
        assert_eq!(c0.binding["a"], "left");
        assert_eq!(c1.binding["a"], "right");
    }

    #[test]
    fn modify_rejects_unknown_origins() {
        let (d, _) = setup();
        let step = crate::model::GroundAction {
            schema: "fly".into(),
            args: vec![],
            origin: "fly".into(),
            binding: BTreeMap::new(),
            pre: BTreeSet::new(),
            add: BTreeSet::new(),
            del: BTreeSet::new(),
        };
        let plan = Plan::new(vec![step]);
        assert!(matches!(
            modify(&d.actions, &plan, &BTreeSet::new()),
            Err(VbpError::UnknownOrigin { .. })
        ));
    }

    #[test]
    fn two_view_run_grounds_through_the_first_plan() {
        let (d, p) = setup();
        let views = parse_views("R+E\nR+E+S+D\n", &d).unwrap();
        let mix: PlannerMix = "SO".parse().unwrap();
        let run_result = run(&d, &p, &views, &mix, BUDGET).unwrap();
        assert_eq!(run_result.records.len(), 2);
        assert_eq!(run_result.records[0].view, 1);
        // View 1: only the filtered move remains (ignite lost its effects).
        assert_eq!(run_result.records[0].action_count, 1);
        // View 2: the move copy plus reintroduced ignite.
        assert_eq!(run_result.records[1].action_count, 2);
        let plan = run_result.final_plan().expect("run should succeed");
        assert_eq!(plan.cost(), 1);
        assert!(matches!(validate(&p, plan), ValidationOutcome::Valid));
        assert_eq!(run_result.considered, keep(&["move", "ignite"]));
        assert_eq!(run_result.failed_view(), None);
    }

    #[test]
    fn empty_filtered_goal_lets_considered_actions_die() {
        // Goal is spatial only; view 1 (R+E) filters it to nothing, solves
        // trivially with the empty plan, and everything considered dies.
        let (d, _) = setup();
        let text = PROB.replace("(and (clear left))", "(and (at ball right))");
        let p = parse_problem(&text, &d).unwrap();
        let views = parse_views("R+E\nR+E+S+D\n", &d).unwrap();
        let mix: PlannerMix = "SS".parse().unwrap();
        let run_result = run(&d, &p, &views, &mix, BUDGET).unwrap();
        // View 1 returns the empty plan; move dies out (considered, unused);
        // ignite is reintroduced but cannot move the ball.
        assert_eq!(run_result.records[0].result.cost(), Some(0));
        assert_eq!(run_result.records[1].action_count, 1);
        assert_eq!(run_result.failed_view(), Some(2));
        assert!(run_result.final_result.is_unsolvable());
    }

    #[test]
    fn mix_length_must_match_views() {
        let (d, p) = setup();
        let views = parse_views("R+E\nR+E+S+D\n", &d).unwrap();
        let mix: PlannerMix = "S".parse().unwrap();
        assert_eq!(
            run(&d, &p, &views, &mix, BUDGET).unwrap_err(),
            VbpError::MixLengthMismatch { mix: 1, views: 2 }
        );
    }

    #[test]
    fn single_full_view_equals_direct_solve() {
        let (d, p) = setup();
        let views = ViewSpec::single_full(&d);
        let mix: PlannerMix = "O".parse().unwrap();
        let run_result = run(&d, &p, &views, &mix, BUDGET).unwrap();
        let task = instantiate(&d, &p);
        let direct = solve(&task, SolverKind::Optimal, BUDGET);
        assert_eq!(run_result.final_result.cost(), direct.cost());
    }

    #[test]
    fn runs_are_deterministic() {
        let (d, p) = setup();
        let views = parse_views("R+E\nR+E+S+D\n", &d).unwrap();
        let mix: PlannerMix = "SO".parse().unwrap();
        let a = run(&d, &p, &views, &mix, BUDGET).unwrap();
        let b = run(&d, &p, &views, &mix, BUDGET).unwrap();
        assert_eq!(a.final_plan(), b.final_plan());
        assert_eq!(a.considered, b.considered);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        /// Filtering is idempotent and only ever shrinks literal sets; the
        /// full keep-set is the identity.
        #[test]
        fn filter_action_laws(extra in proptest::collection::btree_set("at|clear|lit", 0..3)) {
            let (d, _) = setup();
            let mut ks: BTreeSet<String> = extra.into_iter().collect();
            ks.insert("tracked".to_string()); // required always kept
            for action in d.actions.values() {
                match filter_action(action, &ks) {
                    None => {}
                    Some(f) => {
                        prop_assert!(f.pre.is_subset(&action.pre));
                        prop_assert!(f.add.is_subset(&action.add));
                        prop_assert!(f.del.is_subset(&action.del));
                        prop_assert!(!f.add.is_empty() || !f.del.is_empty());
                        // Idempotent.
                        let again = filter_action(&f, &ks).unwrap();
                        prop_assert_eq!(&again, &f);
                        // Params exactly the used ones.
                        for (p, _) in &f.params {
                            prop_assert!(f.literals().any(|l| l.variables().any(|v| v == p)));
                        }
                    }
                }
            }
            let full = d.predicate_names();
            for action in d.actions.values() {
                let unfiltered = filter_action(action, &full);
                prop_assert_eq!(unfiltered.as_ref(), Some(action));
            }
        }
    }
}
