//! A classical planner that solves typed STRIPS problems through a stack of
//! progressively less-filtered *views*.
//!
//! Predicates are declared in four groups — required, elementary (object
//! qualities), spatial (where things are), device (what appliances are
//! doing) — and a view keeps only some of them. Solving a problem inside a
//! small early view yields a rough plan cheaply; its steps then partially
//! ground the action schemas for the next, larger view ([`vbp`]). The
//! grounding shrinks the later search spaces enough that hard instances
//! become feasible, at the price of commitment: a bad early plan can make a
//! later view unsolvable, and nothing backtracks.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] — domains, problems, schemas, ground actions, plan
//!   validation;
//! * [`parser`] — the `.dom` / `.prob` / `.views` file formats and their
//!   canonical serializers;
//! * [`ground`] — reachability-based instantiation into an indexed ground
//!   task;
//! * [`heuristics`] — delete-relaxation heuristics (additive, max, and
//!   landmark-cut);
//! * [`search`] — greedy best-first ("S") and admissible A* ("O") solvers
//!   plus a brute-force optimal oracle for testing;
//! * [`vbp`] — view filtering, plan-guided partial grounding, and the
//!   multi-view driver;
//! * [`kitchen`] — a built-in robot-kitchen benchmark domain with 16 goals;
//! * [`bench`] — the suite runner and cost tables (needs the `cli` feature).

pub mod ground;
pub mod heuristics;
pub mod kitchen;
pub mod model;
pub mod parser;
pub mod search;
pub mod vbp;

#[cfg(feature = "cli")]
pub mod bench;
