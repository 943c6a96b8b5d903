use std::time::Duration;
use viewplan::kitchen;
use viewplan::vbp::{run, PlannerMix};

fn main() {
    let mut args = std::env::args().skip(1);
    let label = args.next().unwrap_or_else(|| "3".into());
    let mix_s = args.next().unwrap_or_else(|| "OSO".into());
    let budget = args.next().and_then(|s| s.parse().ok()).unwrap_or(60u64);

    let domain = kitchen::domain();
    let views = kitchen::default_views(&domain);
    let problem = kitchen::problem(&label).unwrap();
    let mix: PlannerMix = mix_s.parse().unwrap();
    let r = run(&domain, &problem, &views, &mix, Duration::from_secs(budget)).unwrap();
    for rec in &r.records {
        println!(
            "view {} solver {:?}: schemas={} wall={:.2}s expansions={} evaluations={} cost={:?}",
            rec.view,
            rec.solver,
            rec.action_count,
            rec.result.stats.wall_seconds,
            rec.result.stats.expansions,
            rec.result.stats.evaluations,
            rec.result.cost(),
        );
        if let Some(plan) = rec.result.plan() {
            for step in &plan.steps {
                println!("    {} {}", step.schema, step.args.join(" "));
            }
        }
    }
    println!(
        "final cost={:?} total={:.2}s considered={}",
        r.final_plan().map(|p| p.cost()),
        r.total_wall_seconds(),
        r.considered.len(),
    );
}
