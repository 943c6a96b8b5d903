//! Browser bindings for the kitchen benchmark.
//!
//! Every exported function takes and returns plain strings (JSON for the
//! structured ones) so the page needs no generated TypeScript glue beyond
//! what `wasm-pack build --target web` emits. The JSON-building core is
//! ordinary Rust, unit-tested on the host; the `#[wasm_bindgen]` wrappers
//! are one-liners.

use std::collections::BTreeSet;
use std::time::Duration;

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use viewplan::ground::instantiate;
use viewplan::kitchen;
use viewplan::model::{Domain, Group};
use viewplan::search::{solve, SolveOutcome, SolveResult, SolverKind};
use viewplan::vbp::{filter_action, run, PlannerMix};

fn err_json(msg: impl std::fmt::Display) -> String {
    json!({ "ok": false, "error": msg.to_string() }).to_string()
}

fn result_json(domain: &Domain, result: &SolveResult) -> Value {
    let mut v = json!({
        "outcome": match result.outcome {
            SolveOutcome::Plan(_) => "plan",
            SolveOutcome::Unsolvable => "unsolvable",
            SolveOutcome::Timeout => "timeout",
        },
        "seconds": result.stats.wall_seconds,
        "expansions": result.stats.expansions,
    });
    if let Some(plan) = result.plan() {
        v["cost"] = json!(plan.cost());
        // View-level names (with their __k grounding suffixes) show what the
        // solver actually searched over...
        v["steps"] = json!(plan
            .steps
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>());
        // ...while the origin form is the valid plan-file rendering.
        if let Ok(lines) = plan.to_plan_lines(domain) {
            v["plan_lines"] = json!(lines.lines().collect::<Vec<_>>());
        }
    }
    v
}

/// JSON catalog of the 16 benchmark goals: spec, label, goal atoms.
pub fn goal_specs_json() -> String {
    let entries: Vec<Value> = kitchen::GOAL_SPECS
        .iter()
        .map(|spec| {
            let atoms: Vec<String> = kitchen::goal_atoms(spec)
                .expect("catalog specs are valid")
                .iter()
                .map(|a| a.to_string())
                .collect();
            json!({
                "spec": spec,
                "description": kitchen::describe(spec).expect("catalog specs are valid"),
                "atoms": atoms,
            })
        })
        .collect();
    json!({ "ok": true, "goals": entries }).to_string()
}

/// Run the view pipeline on a benchmark goal. `mix` is one solver letter per
/// view (e.g. `"OSO"`), `budget_ms` is per solver call.
pub fn run_vbp_json(goal: &str, mix: &str, budget_ms: u32) -> String {
    let domain = kitchen::domain();
    let problem = match kitchen::problem(goal) {
        Some(p) => p,
        None => return err_json(format_args!("unknown goal spec `{goal}`")),
    };
    let views = kitchen::default_views(&domain);
    let mix: PlannerMix = match mix.parse() {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let budget = Duration::from_millis(budget_ms as u64);
    let outcome = match run(&domain, &problem, &views, &mix, budget) {
        Ok(o) => o,
        Err(e) => return err_json(e),
    };
    let records: Vec<Value> = outcome
        .records
        .iter()
        .map(|r| {
            json!({
                "view": r.view,
                "solver": r.solver.to_string(),
                "schemas": r.action_count,
                "result": result_json(&domain, &r.result),
            })
        })
        .collect();
    json!({
        "ok": true,
        "goal": goal,
        "mix": mix.to_string(),
        "records": records,
        "considered": outcome.considered.iter().collect::<Vec<_>>(),
        "final": result_json(&domain, &outcome.final_result),
        "failed_view": outcome.failed_view(),
        "total_seconds": outcome.total_wall_seconds(),
    })
    .to_string()
}

/// Solve a benchmark goal on the full, unfiltered problem with one solver
/// (`"S"` greedy or `"O"` optimal).
pub fn solve_standalone_json(goal: &str, kind: &str, budget_ms: u32) -> String {
    let domain = kitchen::domain();
    let problem = match kitchen::problem(goal) {
        Some(p) => p,
        None => return err_json(format_args!("unknown goal spec `{goal}`")),
    };
    let kind: SolverKind = match kind.parse() {
        Ok(k) => k,
        Err(e) => return err_json(e),
    };
    let task = instantiate(&domain, &problem);
    let result = solve(&task, kind, Duration::from_millis(budget_ms as u64));
    json!({
        "ok": true,
        "goal": goal,
        "solver": kind.to_string(),
        "result": result_json(&domain, &result),
    })
    .to_string()
}

fn filtered_action_json(domain: &Domain, name: &str, keep: &BTreeSet<String>) -> Value {
    let schema = &domain.actions[name];
    match filter_action(schema, keep) {
        None => json!({ "removed": true }),
        Some(f) => json!({
            "removed": false,
            "params": f.params.iter().map(|(p, t)| format!("?{p} - {t}")).collect::<Vec<_>>(),
            "pre": f.pre.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "add": f.add.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "del": f.del.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        }),
    }
}

/// Show how one kitchen action schema looks inside each of the three views:
/// which literals and parameters survive the filter, or whether the action
/// vanishes entirely.
pub fn action_views_json(action: &str) -> String {
    let domain = kitchen::domain();
    if !domain.actions.contains_key(action) {
        return err_json(format_args!("unknown action `{action}`"));
    }
    let views = kitchen::default_views(&domain);
    let required: Vec<String> = domain
        .group_members(Group::Required)
        .into_iter()
        .map(String::from)
        .collect();
    let per_view: Vec<Value> = (0..views.len())
        .map(|i| {
            let mut keep: BTreeSet<String> = views.view(i).iter().cloned().collect();
            keep.extend(required.iter().cloned());
            json!({
                "view": i + 1,
                "keeps": keep.len(),
                "action": filtered_action_json(&domain, action, &keep),
            })
        })
        .collect();
    json!({
        "ok": true,
        "action": action,
        "actions": domain.actions.keys().collect::<Vec<_>>(),
        "views": per_view,
    })
    .to_string()
}

/// Names of all kitchen actions, for populating the explorer dropdown.
pub fn action_names_json() -> String {
    let domain = kitchen::domain();
    json!({ "ok": true, "actions": domain.actions.keys().collect::<Vec<_>>() }).to_string()
}

#[wasm_bindgen]
pub fn goal_specs() -> String {
    goal_specs_json()
}

#[wasm_bindgen]
pub fn run_vbp(goal: &str, mix: &str, budget_ms: u32) -> String {
    run_vbp_json(goal, mix, budget_ms)
}

#[wasm_bindgen]
pub fn solve_standalone(goal: &str, kind: &str, budget_ms: u32) -> String {
    solve_standalone_json(goal, kind, budget_ms)
}

#[wasm_bindgen]
pub fn action_views(action: &str) -> String {
    action_views_json(action)
}

#[wasm_bindgen]
pub fn action_names() -> String {
    action_names_json()
}
