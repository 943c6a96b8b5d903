//! The built-in robot-kitchen benchmark domain.
//!
//! A one-armed robot faces a table with ingredients, vessels and appliances
//! (microwave, fridge, toaster, contact grill, blender, hair dryer) and has
//! to produce drinks and snacks: heat cola, chill mint tea, toast bread, and
//! so on. Predicates are split into the four view groups — required
//! (presence), elementary (object qualities such as temperature or taste),
//! spatial (containment and distance), device (openness and power) — which is
//! what makes the domain a natural fit for view-stack planning: a first pass
//! can reason purely about qualities ("microwave the water, steep the tea"),
//! later passes fill in where things are and which doors must be open.
//!
//! The module exposes the domain, a catalog of 16 benchmark goals (6 single
//! tasks and 10 pairwise combinations), the standard three-view stack, and a
//! corpus writer that lays all of it out as files for the CLI.

use std::collections::BTreeSet;
use std::io;
use std::path::Path;

use crate::model::{Atom, Domain, Problem};
use crate::parser::{
    parse_domain, parse_problem, parse_views, serialize_domain, serialize_problem,
    serialize_views, ViewSpec,
};

const DOMAIN_SRC: &str = r#"
(define (domain kitchen)
  (:types a_thing an_object a_container a_hand a_vessel a_device
          a_microwave a_fridge a_toaster a_contact_grill a_blender a_hair_dryer)
  (:predicates
    (present ?x - a_thing)
    (absent ?x - a_thing)
    (hot ?x - a_thing)
    (warm ?x - a_thing)
    (cold ?x - a_thing)
    (solid ?x - a_thing)
    (liquid ?x - a_thing)
    (gas ?x - a_thing)
    (gray ?x - a_thing)
    (purple ?x - a_thing)
    (white ?x - a_thing)
    (brown ?x - a_thing)
    (no_color ?x - a_thing)
    (chamomile ?x - a_thing)
    (mint ?x - a_thing)
    (no_aroma ?x - a_thing)
    (salt ?x - a_thing)
    (bitter ?x - a_thing)
    (sweet ?x - a_thing)
    (sour ?x - a_thing)
    (no_taste ?x - a_thing)
    (light ?x - a_thing)
    (dark ?x - a_thing)
    (dry ?x - a_thing)
    (wet ?x - a_thing)
    (soft ?x - a_thing)
    (hard ?x - a_thing)
    (clean ?x - a_thing)
    (dirty ?x - a_thing)
    (whole ?x - a_thing)
    (granular ?x - a_thing)
    (inside ?x - a_thing ?y - a_container)
    (outside ?x - a_thing ?y - a_container)
    (close ?x - a_thing ?y - a_thing)
    (distant ?x - a_thing ?y - a_thing)
    (permeable ?x - a_thing)
    (impermeable ?x - a_thing)
    (closed ?x - a_container)
    (open ?x - a_container)
    (off ?x - a_device)
    (on ?x - a_device))
  (:groups
    (required present absent)
    (elementary hot warm cold solid liquid gas gray purple white brown no_color
                chamomile mint no_aroma salt bitter sweet sour no_taste light dark
                dry wet soft hard clean dirty whole granular)
    (spatial inside outside close distant permeable impermeable)
    (device closed open off on))
  (:families
    (presence present absent)
    (temperature hot warm cold)
    (state_of_matter solid liquid gas)
    (color gray purple white brown no_color)
    (aroma chamomile mint no_aroma)
    (taste salt bitter sweet sour no_taste)
    (light light dark)
    (wetness dry wet)
    (hardness soft hard)
    (cleanness clean dirty)
    (granularity whole granular)
    (content inside outside)
    (distance close distant)
    (permeability permeable impermeable)
    (openness closed open)
    (activity off on))
  (:action put_in
    :parameters (?o - an_object ?c - a_container ?h - a_hand)
    :precondition (and (solid ?o) (inside ?o ?h) (open ?c))
    :effect (and (inside ?o ?c) (not (inside ?o ?h))))
  (:action get_out
    :parameters (?o - an_object ?c - a_container ?h - a_hand)
    :precondition (and (solid ?o) (inside ?o ?c) (open ?c))
    :effect (and (inside ?o ?h) (not (inside ?o ?c))))
  (:action pour
    :parameters (?l - an_object ?src - a_container ?dst - a_vessel ?h - a_hand)
    :precondition (and (liquid ?l) (inside ?l ?src) (inside ?src ?h)
                       (open ?src) (open ?dst) (close ?src ?dst))
    :effect (and (inside ?l ?dst) (not (inside ?l ?src))))
  (:action approach_with
    :parameters (?x - an_object ?t - a_vessel ?h - a_hand)
    :precondition (and (inside ?x ?h) (distant ?x ?t))
    :effect (and (close ?x ?t) (not (distant ?x ?t))))
  (:action open
    :parameters (?c - a_container)
    :precondition (and (closed ?c))
    :effect (and (open ?c) (not (closed ?c))))
  (:action close
    :parameters (?c - a_container)
    :precondition (and (open ?c))
    :effect (and (closed ?c) (not (open ?c))))
  (:action switch_on
    :parameters (?d - a_device)
    :precondition (and (off ?d))
    :effect (and (on ?d) (not (off ?d))))
  (:action switch_off
    :parameters (?d - a_device)
    :precondition (and (on ?d))
    :effect (and (off ?d) (not (on ?d))))
  (:action use_microwave
    :parameters (?m - a_microwave ?o - an_object ?c - a_container)
    :precondition (and (present ?m) (wet ?o) (inside ?c ?m) (inside ?o ?c)
                       (closed ?m) (on ?m))
    :effect (and (hot ?o) (not (cold ?o)) (not (warm ?o))))
  (:action use_fridge
    :parameters (?f - a_fridge ?o - an_object ?c - a_container)
    :precondition (and (present ?f) (wet ?o) (inside ?c ?f) (inside ?o ?c)
                       (closed ?f) (on ?f))
    :effect (and (cold ?o) (not (hot ?o)) (not (warm ?o))))
  (:action use_toaster
    :parameters (?t - a_toaster ?o - an_object)
    :precondition (and (present ?t) (dry ?o) (solid ?o) (inside ?o ?t)
                       (closed ?t) (on ?t))
    :effect (and (hot ?o) (hard ?o) (brown ?o)
                 (not (warm ?o)) (not (cold ?o)) (not (soft ?o)) (not (white ?o))))
  (:action use_contact_grill
    :parameters (?g - a_contact_grill ?o - an_object)
    :precondition (and (present ?g) (dry ?o) (solid ?o) (inside ?o ?g)
                       (closed ?g) (on ?g))
    :effect (and (hot ?o) (hard ?o) (brown ?o)
                 (not (warm ?o)) (not (cold ?o)) (not (soft ?o)) (not (white ?o))))
  (:action use_hair_dryer
    :parameters (?d - a_hair_dryer ?o - an_object ?c - a_vessel)
    :precondition (and (present ?d) (on ?d) (wet ?o) (inside ?o ?c)
                       (open ?c) (close ?d ?c) (inside ?c table))
    :effect (and (hot ?o) (not (cold ?o)) (not (warm ?o))))
  (:action use_blender
    :parameters (?b - a_blender ?o - an_object)
    :precondition (and (present ?b) (solid ?o) (whole ?o) (inside ?o ?b) (on ?b))
    :effect (and (granular ?o) (not (whole ?o))))
  (:action transfer_mint
    :parameters (?o1 - an_object ?o2 - an_object ?c - a_container)
    :precondition (and (mint ?o1) (hot ?o2) (liquid ?o2)
                       (inside ?o1 ?c) (inside ?o2 ?c))
    :effect (and (mint ?o2) (not (no_aroma ?o2))))
  (:action transfer_chamomile
    :parameters (?o1 - an_object ?o2 - an_object ?c - a_container)
    :precondition (and (chamomile ?o1) (hot ?o2) (liquid ?o2)
                       (inside ?o1 ?c) (inside ?o2 ?c))
    :effect (and (chamomile ?o2) (not (no_aroma ?o2))))
  (:action transfer_salt
    :parameters (?o1 - an_object ?o2 - an_object ?c - a_container)
    :precondition (and (salt ?o1) (granular ?o1) (dry ?o2) (solid ?o2)
                       (inside ?o1 ?c) (inside ?o2 ?c))
    :effect (and (salt ?o2) (not (no_taste ?o2)))))
"#;

const OBJECTS_AND_INIT_SRC: &str = r#"  (:objects
    water milk cola white_bread pringles mint_tea_bag chamomile_tea_bag
      hair_dryer water_pitcher milk_pitcher cola_bottle pringles_box
      glass mug plate - an_object
    table tray robot_hand water_pitcher milk_pitcher cola_bottle pringles_box
      glass mug plate microwave fridge toaster contact_grill blender - a_container
    water milk cola white_bread pringles mint_tea_bag chamomile_tea_bag
      hair_dryer water_pitcher milk_pitcher cola_bottle pringles_box glass mug
      plate table tray robot_hand microwave fridge toaster contact_grill
      blender - a_thing
    robot_hand - a_hand
    glass mug - a_vessel
    microwave fridge toaster contact_grill blender hair_dryer - a_device
    microwave - a_microwave
    fridge - a_fridge
    toaster - a_toaster
    contact_grill - a_contact_grill
    blender - a_blender
    hair_dryer - a_hair_dryer)
  (:init
    (present water) (present milk) (present cola) (present white_bread)
    (present pringles) (present mint_tea_bag) (present chamomile_tea_bag)
    (present hair_dryer) (present water_pitcher) (present milk_pitcher)
    (present cola_bottle) (present pringles_box) (present glass) (present mug)
    (present plate) (present table) (present tray) (present robot_hand)
    (present microwave) (present fridge) (present toaster)
    (present contact_grill) (present blender)
    (inside water water_pitcher) (inside milk milk_pitcher)
    (inside cola cola_bottle) (inside pringles pringles_box)
    (inside white_bread table) (inside mint_tea_bag table)
    (inside chamomile_tea_bag table) (inside hair_dryer table)
    (inside water_pitcher table) (inside milk_pitcher table)
    (inside cola_bottle table) (inside pringles_box table)
    (inside mug table) (inside tray table)
    (inside glass tray) (inside plate tray)
    (open table) (open tray) (open glass) (open plate) (open pringles_box)
    (open toaster) (open blender)
    (closed mug) (closed water_pitcher) (closed milk_pitcher)
    (closed cola_bottle) (closed microwave) (closed fridge)
    (closed contact_grill)
    (off microwave) (off toaster) (off blender) (off hair_dryer)
    (off contact_grill)
    (on fridge)
    (warm water) (warm milk) (warm cola) (warm white_bread)
    (wet water) (wet milk) (wet cola)
    (dry white_bread)
    (liquid water) (liquid milk) (liquid cola)
    (solid white_bread) (solid pringles) (solid mint_tea_bag)
    (solid chamomile_tea_bag) (solid hair_dryer) (solid water_pitcher)
    (solid milk_pitcher) (solid cola_bottle) (solid pringles_box)
    (solid glass) (solid mug) (solid plate)
    (no_aroma water) (no_aroma milk) (no_aroma cola)
    (mint mint_tea_bag) (chamomile chamomile_tea_bag)
    (no_taste water) (no_taste milk) (no_taste white_bread)
    (sweet cola) (salt pringles)
    (no_color water) (white milk) (white white_bread) (brown pringles)
    (dark cola)
    (soft white_bread) (hard pringles)
    (whole pringles)
    (clean glass) (clean mug) (clean plate) (clean tray)
    (permeable mint_tea_bag) (permeable chamomile_tea_bag)
    (impermeable water_pitcher) (impermeable milk_pitcher)
    (impermeable cola_bottle) (impermeable glass) (impermeable mug)
    (distant water glass) (distant milk glass) (distant cola glass)
    (distant white_bread glass) (distant pringles glass)
    (distant mint_tea_bag glass) (distant chamomile_tea_bag glass)
    (distant hair_dryer glass) (distant water_pitcher glass)
    (distant milk_pitcher glass) (distant cola_bottle glass)
    (distant pringles_box glass) (distant mug glass) (distant plate glass)
    (distant water mug) (distant milk mug) (distant cola mug)
    (distant white_bread mug) (distant pringles mug)
    (distant mint_tea_bag mug) (distant chamomile_tea_bag mug)
    (distant hair_dryer mug) (distant water_pitcher mug)
    (distant milk_pitcher mug) (distant cola_bottle mug)
    (distant pringles_box mug) (distant glass mug) (distant plate mug))
"#;

/// The three-view stack the benchmark runs with: qualities only, then
/// qualities + space, then everything.
pub const VIEWS_SRC: &str = "R+E\nR+E+S\nR+E+S+D\n";

/// Short labels for the six single goals, in goal-number order.
pub const GOAL_DESCRIPTIONS: [&str; 6] = [
    "cola, hot, inside glass, inside tray",
    "cola, cold, inside glass, inside tray",
    "milk, hot, inside mug, inside tray",
    "water, mint, cold, inside glass, inside tray",
    "white_bread, hot, hard, brown, inside plate, inside tray",
    "white_bread hot, hard, brown, salty, inside plate, inside tray",
];

/// The benchmark suite: all six single goals plus the ten studied pairs.
/// `"1+5"` means the union of goals 1 and 5 must hold at the same time;
/// `"0+1"` asks for cola both hot and cold and is unachievable.
pub const GOAL_SPECS: [&str; 16] = [
    "0", "1", "2", "3", "4", "5", "1+5", "0+2", "1+2", "2+5", "0+5", "1+3", "2+3", "0+3",
    "3+5", "0+1",
];

/// A deliberately non-minimal hand-written plan for goal 3 (mint tea, chilled,
/// served in the glass): it needlessly switches the microwave back off. Used
/// as a validation specimen by tests and the CLI demo corpus.
pub const SAMPLE_PLAN_GOAL_3: [&str; 21] = [
    "get_out mint_tea_bag table robot_hand",
    "open water_pitcher",
    "put_in mint_tea_bag water_pitcher robot_hand",
    "get_out water_pitcher table robot_hand",
    "open microwave",
    "put_in water_pitcher microwave robot_hand",
    "close microwave",
    "switch_on microwave",
    "use_microwave microwave water water_pitcher",
    "switch_off microwave",
    "transfer_mint mint_tea_bag water water_pitcher",
    "open microwave",
    "get_out water_pitcher microwave robot_hand",
    "open fridge",
    "put_in water_pitcher fridge robot_hand",
    "close fridge",
    "use_fridge fridge water water_pitcher",
    "open fridge",
    "get_out water_pitcher fridge robot_hand",
    "approach_with water_pitcher glass robot_hand",
    "pour water water_pitcher glass robot_hand",
];

/// Parse the built-in domain. Panics only if the embedded source is broken,
/// which the test suite guards against.
pub fn domain() -> Domain {
    parse_domain(DOMAIN_SRC).expect("embedded kitchen domain is well-formed")
}

/// The standard view stack for `domain()`.
pub fn default_views(domain: &Domain) -> ViewSpec {
    parse_views(VIEWS_SRC, domain).expect("embedded kitchen views are well-formed")
}

fn single_goal(index: usize) -> Option<Vec<Atom>> {
    let atoms = match index {
        0 => vec![
            Atom::new("hot", &["cola"]),
            Atom::new("inside", &["cola", "glass"]),
            Atom::new("inside", &["glass", "tray"]),
        ],
        1 => vec![
            Atom::new("cold", &["cola"]),
            Atom::new("inside", &["cola", "glass"]),
            Atom::new("inside", &["glass", "tray"]),
        ],
        2 => vec![
            Atom::new("hot", &["milk"]),
            Atom::new("inside", &["milk", "mug"]),
            Atom::new("inside", &["mug", "tray"]),
        ],
        3 => vec![
            Atom::new("mint", &["water"]),
            Atom::new("cold", &["water"]),
            Atom::new("inside", &["water", "glass"]),
            Atom::new("inside", &["glass", "tray"]),
            Atom::new("inside", &["tray", "table"]),
        ],
        4 => vec![
            Atom::new("hot", &["white_bread"]),
            Atom::new("hard", &["white_bread"]),
            Atom::new("brown", &["white_bread"]),
            Atom::new("inside", &["white_bread", "plate"]),
            Atom::new("inside", &["plate", "tray"]),
        ],
        5 => vec![
            Atom::new("hot", &["white_bread"]),
            Atom::new("hard", &["white_bread"]),
            Atom::new("brown", &["white_bread"]),
            Atom::new("salt", &["white_bread"]),
            Atom::new("inside", &["white_bread", "plate"]),
            Atom::new("inside", &["plate", "tray"]),
        ],
        _ => return None,
    };
    Some(atoms)
}

/// The goal atoms for a spec such as `"3"` or `"1+5"` (union of the parts).
/// Returns `None` for anything that is not a `+`-separated list of goal
/// numbers 0..=5.
pub fn goal_atoms(spec: &str) -> Option<BTreeSet<Atom>> {
    let mut out = BTreeSet::new();
    for part in spec.split('+') {
        let index: usize = part.trim().parse().ok()?;
        out.extend(single_goal(index)?);
    }
    Some(out)
}

/// Human-readable label for a goal spec.
pub fn describe(spec: &str) -> Option<String> {
    let parts: Vec<&str> = spec.split('+').map(str::trim).collect();
    match parts.as_slice() {
        [single] => {
            let index: usize = single.parse().ok()?;
            GOAL_DESCRIPTIONS.get(index).map(|d| d.to_string())
        }
        [a, b] => {
            let ia: usize = a.parse().ok()?;
            let ib: usize = b.parse().ok()?;
            if ia > 5 || ib > 5 {
                return None;
            }
            Some(format!("goals {ia} and {ib} at once"))
        }
        _ => None,
    }
}

/// File stem for a goal spec: `"1+5"` becomes `goal_1_5`.
pub fn file_stem(spec: &str) -> String {
    format!("goal_{}", spec.replace('+', "_"))
}

/// Build the benchmark problem for a goal spec against `domain()`.
pub fn problem(spec: &str) -> Option<Problem> {
    let atoms = goal_atoms(spec)?;
    let d = domain();
    Some(problem_with_goal(&d, spec, &atoms))
}

/// Build a kitchen problem with an arbitrary goal set (atoms must be over the
/// kitchen objects and predicates).
pub fn problem_with_goal(domain: &Domain, spec: &str, goal: &BTreeSet<Atom>) -> Problem {
    let name = format!("kitchen_{}", spec.replace('+', "_"));
    let goal_text: String = goal
        .iter()
        .map(|a| format!("    {a}\n"))
        .collect();
    let src = format!(
        "(define (problem {name})\n  (:domain kitchen)\n{OBJECTS_AND_INIT_SRC}  (:goal (and\n{goal_text})))\n"
    );
    parse_problem(&src, domain).expect("embedded kitchen problem is well-formed")
}

/// Write the whole benchmark corpus into `dir`: `kitchen.dom`,
/// `kitchen.views`, one `goal_*.prob` per spec in [`GOAL_SPECS`], and
/// `sample_goal_3.plan`. All files are in canonical serialized form, so the
/// output is byte-for-byte reproducible.
pub fn write_corpus(dir: &Path) -> io::Result<()> {
    let d = domain();
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("kitchen.dom"), serialize_domain(&d))?;
    std::fs::write(
        dir.join("kitchen.views"),
        serialize_views(&default_views(&d), &d),
    )?;
    for spec in GOAL_SPECS {
        let p = problem(spec).expect("catalog specs are valid");
        std::fs::write(
            dir.join(format!("{}.prob", file_stem(spec))),
            serialize_problem(&p),
        )?;
    }
    let mut sample = String::new();
    for line in SAMPLE_PLAN_GOAL_3 {
        sample.push_str(line);
        sample.push('\n');
    }
    std::fs::write(dir.join("sample_goal_3.plan"), sample)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::instantiate;
    use crate::model::{ground_schema, validate, Group, Plan, ValidationOutcome};
    use crate::search::{solve, SolverKind};
    use crate::vbp::{run, PlannerMix};
    use std::time::Duration;

    fn fixture_plan(d: &Domain, p: &Problem, lines: &[&str]) -> Plan {
        let steps = lines
            .iter()
            .map(|line| {
                let mut it = line.split_whitespace();
                let name = it.next().expect("non-empty plan line");
                let args: Vec<&str> = it.collect();
                ground_schema(d, p, name, &args)
                    .unwrap_or_else(|e| panic!("bad fixture step `{line}`: {e}"))
            })
            .collect();
        Plan::new(steps)
    }

    fn assert_valid(d: &Domain, p: &Problem, lines: &[&str]) -> Plan {
        let plan = fixture_plan(d, p, lines);
        let outcome = validate(p, &plan);
        assert!(
            matches!(outcome, ValidationOutcome::Valid),
            "fixture plan rejected: {outcome}"
        );
        plan
    }

    #[test]
    fn domain_shape() {
        let d = domain();
        assert_eq!(d.types.len(), 12);
        assert_eq!(d.predicates.len(), 41);
        assert_eq!(d.actions.len(), 17);
        assert_eq!(d.group_members(Group::Required).len(), 2);
        assert_eq!(d.group_members(Group::Elementary).len(), 29);
        assert_eq!(d.group_members(Group::Spatial).len(), 6);
        assert_eq!(d.group_members(Group::Device).len(), 4);
        assert_eq!(d.predicates["hot"].family, "temperature");
        assert_eq!(d.predicates["inside"].family, "content");
        // The hair dryer schema pins its vessel to the table by constant.
        let dryer = &d.actions["use_hair_dryer"];
        assert!(dryer.pre.iter().any(|l| l.pred == "inside"
            && l.args[1] == crate::model::Term::obj("table")));
    }

    #[test]
    fn problem_shape() {
        let p = problem("3").unwrap();
        assert_eq!(p.name, "kitchen_3");
        assert_eq!(p.objects.len(), 23);
        assert_eq!(p.objects["glass"].len(), 4); // object, container, vessel, thing
        assert_eq!(p.init.len(), 139);
        assert_eq!(p.goal.len(), 5);
        // The robot hand is deliberately neither open nor closed: nothing can
        // be poured into it.
        assert!(!p.init.contains(&Atom::new("open", &["robot_hand"])));
        assert!(!p.init.contains(&Atom::new("closed", &["robot_hand"])));
        // The fridge is the only appliance running from the start.
        assert!(p.init.contains(&Atom::new("on", &["fridge"])));
        for dev in ["microwave", "toaster", "blender", "hair_dryer", "contact_grill"] {
            assert!(p.init.contains(&Atom::new("off", &[dev])), "{dev} should be off");
        }
    }

    #[test]
    fn goal_catalog() {
        assert_eq!(GOAL_SPECS.len(), 16);
        for spec in GOAL_SPECS {
            assert!(goal_atoms(spec).is_some(), "spec {spec} should parse");
            assert!(describe(spec).is_some());
            assert!(problem(spec).is_some());
        }
        assert!(goal_atoms("6").is_none());
        assert!(goal_atoms("x").is_none());
        let union = goal_atoms("0+1").unwrap();
        assert!(union.contains(&Atom::new("hot", &["cola"])));
        assert!(union.contains(&Atom::new("cold", &["cola"])));
        assert_eq!(union.len(), 4); // the two inside atoms coincide
        assert_eq!(file_stem("1+5"), "goal_1_5");
        assert_eq!(describe("4").unwrap(), GOAL_DESCRIPTIONS[4]);
    }

    #[test]
    fn sample_plan_for_goal_3_is_valid() {
        let d = domain();
        let p = problem("3").unwrap();
        let plan = assert_valid(&d, &p, &SAMPLE_PLAN_GOAL_3);
        assert_eq!(plan.cost(), 21);
        // Dropping the superfluous switch-off yields the 20-step route.
        let trimmed: Vec<&str> = SAMPLE_PLAN_GOAL_3
            .iter()
            .copied()
            .filter(|l| *l != "switch_off microwave")
            .collect();
        let plan = assert_valid(&d, &p, &trimmed);
        assert_eq!(plan.cost(), 20);
    }

    #[test]
    fn reference_routes_are_valid() {
        let d = domain();

        // Goal 4: toast the bread, serve it on the plate. 8 steps.
        let toast = [
            "get_out white_bread table robot_hand",
            "put_in white_bread toaster robot_hand",
            "close toaster",
            "switch_on toaster",
            "use_toaster toaster white_bread",
            "open toaster",
            "get_out white_bread toaster robot_hand",
            "put_in white_bread plate robot_hand",
        ];
        let p4 = problem("4").unwrap();
        assert_eq!(assert_valid(&d, &p4, &toast).cost(), 8);

        // Goal 1: chill the cola in the fridge, pour it into the glass. 10 steps.
        let chill = [
            "get_out cola_bottle table robot_hand",
            "open fridge",
            "put_in cola_bottle fridge robot_hand",
            "close fridge",
            "use_fridge fridge cola cola_bottle",
            "open fridge",
            "get_out cola_bottle fridge robot_hand",
            "open cola_bottle",
            "approach_with cola_bottle glass robot_hand",
            "pour cola cola_bottle glass robot_hand",
        ];
        let p1 = problem("1").unwrap();
        assert_eq!(assert_valid(&d, &p1, &chill).cost(), 10);

        // Goal 0: same shape through the microwave, which must also be
        // switched on. 11 steps.
        let heat_cola = [
            "get_out cola_bottle table robot_hand",
            "open microwave",
            "put_in cola_bottle microwave robot_hand",
            "close microwave",
            "switch_on microwave",
            "use_microwave microwave cola cola_bottle",
            "open microwave",
            "get_out cola_bottle microwave robot_hand",
            "open cola_bottle",
            "approach_with cola_bottle glass robot_hand",
            "pour cola cola_bottle glass robot_hand",
        ];
        let p0 = problem("0").unwrap();
        assert_eq!(assert_valid(&d, &p0, &heat_cola).cost(), 11);

        // Goal 5: toast as for goal 4, then grind pringles in the blender and
        // salt the bread with them. 15 steps.
        let salty = [
            "get_out white_bread table robot_hand",
            "put_in white_bread toaster robot_hand",
            "close toaster",
            "switch_on toaster",
            "use_toaster toaster white_bread",
            "open toaster",
            "get_out white_bread toaster robot_hand",
            "put_in white_bread plate robot_hand",
            "get_out pringles pringles_box robot_hand",
            "put_in pringles blender robot_hand",
            "switch_on blender",
            "use_blender blender pringles",
            "get_out pringles blender robot_hand",
            "put_in pringles plate robot_hand",
            "transfer_salt pringles white_bread plate",
        ];
        let p5 = problem("5").unwrap();
        assert_eq!(assert_valid(&d, &p5, &salty).cost(), 15);
    }

    #[test]
    fn hair_dryer_route_beats_microwaving_the_mug() {
        let d = domain();
        let p2 = problem("2").unwrap();

        // Heating milk where it sits: pour it into the mug on the table and
        // point the hair dryer at it. 11 steps, and the mug itself is only
        // handled twice (off the table, onto the tray).
        let dryer_route = [
            "get_out milk_pitcher table robot_hand",
            "open milk_pitcher",
            "open mug",
            "approach_with milk_pitcher mug robot_hand",
            "pour milk milk_pitcher mug robot_hand",
            "get_out hair_dryer table robot_hand",
            "switch_on hair_dryer",
            "approach_with hair_dryer mug robot_hand",
            "use_hair_dryer hair_dryer milk mug",
            "get_out mug table robot_hand",
            "put_in mug tray robot_hand",
        ];
        let dryer_plan = assert_valid(&d, &p2, &dryer_route);
        assert_eq!(dryer_plan.cost(), 11);

        // The appliance alternative: carry the filled mug into the microwave
        // and back out again. 14 steps, four mug manipulations.
        let microwave_route = [
            "get_out milk_pitcher table robot_hand",
            "open milk_pitcher",
            "open mug",
            "approach_with milk_pitcher mug robot_hand",
            "pour milk milk_pitcher mug robot_hand",
            "get_out mug table robot_hand",
            "open microwave",
            "put_in mug microwave robot_hand",
            "close microwave",
            "switch_on microwave",
            "use_microwave microwave milk mug",
            "open microwave",
            "get_out mug microwave robot_hand",
            "put_in mug tray robot_hand",
        ];
        let microwave_plan = assert_valid(&d, &p2, &microwave_route);
        assert_eq!(microwave_plan.cost(), 14);

        let mug_handling = |plan: &Plan| {
            plan.steps
                .iter()
                .filter(|s| {
                    (s.schema == "put_in" || s.schema == "get_out") && s.args[0] == "mug"
                })
                .count()
        };
        assert!(dryer_plan.cost() < microwave_plan.cost());
        assert_eq!(mug_handling(&dryer_plan), 2);
        assert_eq!(mug_handling(&microwave_plan), 4);
    }

    #[test]
    fn greedy_solves_the_toast_goal() {
        let d = domain();
        let p = problem("4").unwrap();
        let task = instantiate(&d, &p);
        let result = solve(&task, SolverKind::Satisficing, Duration::from_secs(20));
        let plan = result.plan().expect("goal 4 is solvable");
        assert!(matches!(validate(&p, plan), ValidationOutcome::Valid));
        assert!(plan.cost() >= 8);
    }

    #[test]
    fn hot_and_cold_cola_dies_in_the_first_view()  {
        let d = domain();
        let p = problem("0+1").unwrap();
        let views = default_views(&d);
        let mix: PlannerMix = "SSS".parse().unwrap();
        let outcome = run(&d, &p, &views, &mix, Duration::from_secs(5)).unwrap();
        assert_eq!(outcome.failed_view(), Some(1));
        assert!(outcome.final_result.is_unsolvable());
        assert_eq!(outcome.records.len(), 1);
        // The quality-only view grounds to a handful of appliance uses.
        let view1 = &outcome.records[0];
        assert_eq!(view1.action_count, 9);
    }

    #[test]
    fn corpus_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path()).unwrap();
        let d = parse_domain(&std::fs::read_to_string(dir.path().join("kitchen.dom")).unwrap())
            .unwrap();
        assert_eq!(d.actions.len(), 17);
        let views_text = std::fs::read_to_string(dir.path().join("kitchen.views")).unwrap();
        let views = parse_views(&views_text, &d).unwrap();
        assert_eq!(views.len(), 3);
        for spec in GOAL_SPECS {
            let path = dir.path().join(format!("{}.prob", file_stem(spec)));
            let p = parse_problem(&std::fs::read_to_string(&path).unwrap(), &d).unwrap();
            assert_eq!(p.goal, goal_atoms(spec).unwrap());
        }
        // Writing twice produces identical bytes.
        let dir2 = tempfile::tempdir().unwrap();
        write_corpus(dir2.path()).unwrap();
        let dom1 = std::fs::read(dir.path().join("kitchen.dom")).unwrap();
        let dom2 = std::fs::read(dir2.path().join("kitchen.dom")).unwrap();
        assert_eq!(dom1, dom2);
        let prob1 = std::fs::read(dir.path().join("goal_1_5.prob")).unwrap();
        let prob2 = std::fs::read(dir2.path().join("goal_1_5.prob")).unwrap();
        assert_eq!(prob1, prob2);
    }
}
