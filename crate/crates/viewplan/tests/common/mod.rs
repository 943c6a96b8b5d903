//! Shared test helpers: a deterministic generator of tiny one-object tasks,
//! small enough for exhaustive search, used to cross-check the production
//! solvers and heuristics against the brute-force oracle.

use std::collections::BTreeSet;

use indexmap::{IndexMap, IndexSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use viewplan::model::{
    ActionSchema, Atom, Domain, Group, Literal, PredicateSchema, Problem, Term,
};

/// Generate a random propositional task: up to 9 unary facts about a single
/// object `x`, and a handful of fully ground actions flipping random subsets
/// of them. The state space is at most 2^9 = 512 states, so breadth-first
/// search exhausts it instantly and its answer can be treated as ground
/// truth.
pub fn micro_task(rng: &mut ChaCha8Rng, index: usize) -> (Domain, Problem) {
    let n_atoms: usize = rng.gen_range(4..=9);
    let n_actions: usize = rng.gen_range(2..=10);

    let lit = |i: usize| Literal::positive(format!("p{i}"), vec![Term::obj("x")]);
    let atom = |i: usize| Atom::new(format!("p{i}"), &["x"]);

    let mut predicates = IndexMap::new();
    for i in 0..n_atoms {
        predicates.insert(
            format!("p{i}"),
            PredicateSchema {
                name: format!("p{i}"),
                param_types: vec!["t".to_string()],
                group: Group::Elementary,
                family: format!("p{i}"),
            },
        );
    }

    let mut actions = IndexMap::new();
    for a in 0..n_actions {
        let mut pick = |prob: f64| -> BTreeSet<Literal> {
            (0..n_atoms).filter(|_| rng.gen_bool(prob)).map(lit).collect()
        };
        let pre = pick(0.3);
        let mut add = pick(0.3);
        let del = pick(0.25);
        if add.is_empty() && del.is_empty() {
            // An action without effects could never matter; give it one.
            add.insert(lit(rng.gen_range(0..n_atoms)));
        }
        let name = format!("a{a}");
        actions.insert(name.clone(), ActionSchema::new(name, vec![], pre, add, del));
    }

    let types: IndexSet<String> = ["t".to_string()].into_iter().collect();
    let domain = Domain {
        name: format!("micro_{index}"),
        types,
        predicates,
        actions,
    };

    let init: BTreeSet<Atom> = (0..n_atoms).filter(|_| rng.gen_bool(0.5)).map(atom).collect();
    let n_goal = rng.gen_range(1..=2);
    let mut goal = BTreeSet::new();
    while goal.len() < n_goal {
        goal.insert(atom(rng.gen_range(0..n_atoms)));
    }
    let objects: IndexMap<String, BTreeSet<String>> = [(
        "x".to_string(),
        ["t".to_string()].into_iter().collect::<BTreeSet<String>>(),
    )]
    .into_iter()
    .collect();
    let problem = Problem {
        name: format!("micro_{index}_p"),
        domain: format!("micro_{index}"),
        objects,
        init,
        goal,
    };
    (domain, problem)
}
