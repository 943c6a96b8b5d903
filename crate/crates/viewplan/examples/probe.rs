use std::time::{Duration, Instant};
use viewplan::ground::instantiate;
use viewplan::kitchen;
use viewplan::search::{solve, SolverKind};

fn main() {
    let d = kitchen::domain();
    for g in ["4", "1", "2", "0", "5"] {
        let p = kitchen::problem(g).unwrap();
        let task = instantiate(&d, &p);
        let t0 = Instant::now();
        let r = solve(&task, SolverKind::Optimal, Duration::from_secs(300));
        println!(
            "goal {g}: cost={:?} wall={:.2}s expansions={} evaluations={} ({:.1} us/eval)",
            r.cost(),
            t0.elapsed().as_secs_f64(),
            r.stats.expansions,
            r.stats.evaluations,
            1e6 * t0.elapsed().as_secs_f64() / r.stats.evaluations.max(1) as f64,
        );
    }
}
