use std::time::{Duration, Instant};
use viewplan::ground::instantiate;
use viewplan::kitchen;
use viewplan::search::solve;
use viewplan::vbp::{run, PlannerMix};

fn main() {
    let budget = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5u64);
    let domain = kitchen::domain();
    let views = kitchen::default_views(&domain);
    let mixes = ["S", "O", "SSS", "OOO", "OSO", "SSO"];

    let t0 = Instant::now();
    for label in kitchen::GOAL_SPECS {
        let problem = kitchen::problem(label).unwrap();
        for m in mixes {
            let mix: PlannerMix = m.parse().unwrap();
            let t1 = Instant::now();
            let cost = if mix.len() == 1 {
                let task = instantiate(&domain, &problem);
                let result = solve(&task, mix.kinds()[0], Duration::from_secs(budget));
                result.cost()
            } else {
                let r = run(&domain, &problem, &views, &mix, Duration::from_secs(budget)).unwrap();
                r.final_plan().map(|p| p.cost())
            };
            println!(
                "goal {label:4} mix {m:4}: {:6.2}s cost={cost:?}",
                t1.elapsed().as_secs_f64(),
            );
        }
    }
    println!("total: {:.1}s at budget {budget}s", t0.elapsed().as_secs_f64());
}
