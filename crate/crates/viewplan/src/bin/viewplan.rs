use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use viewplan::bench::{compare_costs, emit_table, load_corpus, run_suite, BenchError, TableFormat};
use viewplan::ground::instantiate;
use viewplan::kitchen;
use viewplan::model::{ground_schema, validate, Domain, Plan, Problem, ValidationOutcome};
use viewplan::parser::{parse_domain, parse_problem, parse_views};
use viewplan::search::{solve, SolveOutcome, SolveResult};
use viewplan::vbp::{run, PlannerMix};

const EXIT_INVALID: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_UNSOLVABLE: i32 = 10;
const EXIT_TIMEOUT: i32 = 11;

#[derive(Parser)]
#[command(
    name = "viewplan",
    version,
    about = "Plan through predicate views: filter, solve, ground, repeat"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem, either directly or through a view stack
    Plan {
        /// Domain file (.dom)
        #[arg(long)]
        domain: PathBuf,
        /// Problem file (.prob)
        #[arg(long)]
        problem: PathBuf,
        /// View stack file (.views); omit to solve the full problem directly
        #[arg(long)]
        views: Option<PathBuf>,
        /// One solver letter per view — S (greedy) or O (optimal), e.g. OSO;
        /// a single letter when solving without --views
        #[arg(long, default_value = "S")]
        mix: String,
        /// Seconds per solver call
        #[arg(long, default_value_t = 20.0)]
        budget: f64,
        /// Print the plan itself, one action per line
        #[arg(long)]
        print_plan: bool,
    },
    /// Run a corpus of goals under several mixes and print a cost table
    Suite {
        /// Directory holding kitchen.dom, kitchen.views and goal_*.prob
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated mixes, each a string of S/O letters
        #[arg(long, default_value = "S,O,SSS,OOO,OSO,SSO")]
        mixes: String,
        /// Seconds per solver call
        #[arg(long, default_value_t = 20.0)]
        budget: f64,
        /// Write the table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Table format: csv or md
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Check a plan file step by step against a domain and problem
    Validate {
        /// Domain file (.dom)
        #[arg(long)]
        domain: PathBuf,
        /// Problem file (.prob)
        #[arg(long)]
        problem: PathBuf,
        /// Plan file: one action per line, name then arguments
        #[arg(long)]
        plan: PathBuf,
    },
    /// Write the built-in kitchen benchmark corpus to a directory
    EmitCorpus {
        /// Target directory (created if missing)
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Plan {
            domain,
            problem,
            views,
            mix,
            budget,
            print_plan,
        } => cmd_plan(&domain, &problem, views.as_deref(), &mix, budget, print_plan),
        Command::Suite {
            corpus,
            mixes,
            budget,
            out,
            format,
        } => cmd_suite(&corpus, &mixes, budget, out.as_deref(), &format),
        Command::Validate {
            domain,
            problem,
            plan,
        } => cmd_validate(&domain, &problem, &plan),
        Command::EmitCorpus { out } => cmd_emit_corpus(&out),
    };
    std::process::exit(code);
}

fn fail(code: i32, msg: impl Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn read_file(path: &Path) -> Result<String, i32> {
    fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format_args!("cannot read {}: {e}", path.display())))
}

fn load_domain_and_problem(
    domain_path: &Path,
    problem_path: &Path,
) -> Result<(Domain, Problem), i32> {
    let domain_text = read_file(domain_path)?;
    let domain = parse_domain(&domain_text)
        .map_err(|e| fail(EXIT_USAGE, format_args!("{}: {e}", domain_path.display())))?;
    let problem_text = read_file(problem_path)?;
    let problem = parse_problem(&problem_text, &domain)
        .map_err(|e| fail(EXIT_USAGE, format_args!("{}: {e}", problem_path.display())))?;
    Ok((domain, problem))
}

fn parse_budget(seconds: f64) -> Result<Duration, i32> {
    if !seconds.is_finite() || seconds < 0.0 {
        return Err(fail(
            EXIT_USAGE,
            "budget must be a non-negative number of seconds",
        ));
    }
    Ok(Duration::from_secs_f64(seconds))
}

fn describe_result(result: &SolveResult) -> String {
    let s = &result.stats;
    match &result.outcome {
        SolveOutcome::Plan(p) => format!(
            "plan with {} steps ({:.2}s, {} expansions)",
            p.cost(),
            s.wall_seconds,
            s.expansions
        ),
        SolveOutcome::Unsolvable => format!(
            "unsolvable ({:.2}s, {} expansions)",
            s.wall_seconds, s.expansions
        ),
        SolveOutcome::Timeout => format!("timeout ({:.2}s)", s.wall_seconds),
    }
}

/// Map a final outcome to an exit code, validating and optionally printing
/// the plan.
fn finish(domain: &Domain, problem: &Problem, outcome: &SolveOutcome, print_plan: bool) -> i32 {
    match outcome {
        SolveOutcome::Plan(plan) => {
            let verdict = validate(problem, plan);
            if !verdict.is_valid() {
                return fail(
                    EXIT_INVALID,
                    format_args!("internal error: produced plan fails validation: {verdict}"),
                );
            }
            if print_plan {
                match plan.to_plan_lines(domain) {
                    Ok(text) => print!("{text}"),
                    Err(e) => return fail(EXIT_INVALID, e),
                }
            }
            0
        }
        SolveOutcome::Unsolvable => EXIT_UNSOLVABLE,
        SolveOutcome::Timeout => EXIT_TIMEOUT,
    }
}

fn cmd_plan(
    domain_path: &Path,
    problem_path: &Path,
    views_path: Option<&Path>,
    mix: &str,
    budget: f64,
    print_plan: bool,
) -> i32 {
    let budget = match parse_budget(budget) {
        Ok(b) => b,
        Err(c) => return c,
    };
    let (domain, problem) = match load_domain_and_problem(domain_path, problem_path) {
        Ok(x) => x,
        Err(c) => return c,
    };
    let mix: PlannerMix = match mix.parse() {
        Ok(m) => m,
        Err(e) => return fail(EXIT_USAGE, e),
    };

    match views_path {
        None => {
            if mix.len() != 1 {
                return fail(EXIT_USAGE, "without --views, --mix must be a single S or O");
            }
            let task = instantiate(&domain, &problem);
            let result = solve(&task, mix.kinds()[0], budget);
            println!(
                "{} [{}]: {}",
                problem.name,
                mix.kinds()[0],
                describe_result(&result)
            );
            finish(&domain, &problem, &result.outcome, print_plan)
        }
        Some(vpath) => {
            let views_text = match read_file(vpath) {
                Ok(t) => t,
                Err(c) => return c,
            };
            let views = match parse_views(&views_text, &domain) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_USAGE, format_args!("{}: {e}", vpath.display())),
            };
            let outcome = match run(&domain, &problem, &views, &mix, budget) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_USAGE, e),
            };
            for rec in &outcome.records {
                println!(
                    "view {}/{} [{}]: {} schemas, {}",
                    rec.view,
                    views.len(),
                    rec.solver,
                    rec.action_count,
                    describe_result(&rec.result)
                );
            }
            println!(
                "{} [{}]: {} in {:.2}s total",
                problem.name,
                mix,
                match &outcome.final_result.outcome {
                    SolveOutcome::Plan(p) => format!("plan with {} steps", p.cost()),
                    SolveOutcome::Unsolvable => format!(
                        "unsolvable in view {}",
                        outcome.failed_view().unwrap_or_default()
                    ),
                    SolveOutcome::Timeout => format!(
                        "timeout in view {}",
                        outcome.failed_view().unwrap_or_default()
                    ),
                },
                outcome.total_wall_seconds()
            );
            finish(&domain, &problem, &outcome.final_result.outcome, print_plan)
        }
    }
}

fn cmd_suite(
    corpus: &Path,
    mixes: &str,
    budget: f64,
    out: Option<&Path>,
    format: &str,
) -> i32 {
    let budget = match parse_budget(budget) {
        Ok(b) => b,
        Err(c) => return c,
    };
    let format: TableFormat = match format.parse() {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let mixes: Vec<PlannerMix> = match mixes
        .split(',')
        .map(|m| m.trim().parse())
        .collect::<Result<_, _>>()
    {
        Ok(v) => v,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let (domain, views, problems) = match load_corpus(corpus) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    if problems.is_empty() {
        return fail(
            EXIT_USAGE,
            format_args!("no goal_*.prob files in {}", corpus.display()),
        );
    }
    eprintln!(
        "running {} goals x {} mixes, {}s per solver call...",
        problems.len(),
        mixes.len(),
        budget.as_secs_f64()
    );
    let records = match run_suite(&domain, &views, &problems, &mixes, budget) {
        Ok(r) => r,
        Err(e @ BenchError::InvalidPlan { .. }) => return fail(EXIT_INVALID, e),
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let table = match emit_table(&records, format) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, &table) {
                return fail(
                    EXIT_USAGE,
                    format_args!("cannot write {}: {e}", path.display()),
                );
            }
            eprintln!("wrote {}", path.display());
        }
        None => print!("{table}"),
    }
    let violations = compare_costs(&records);
    if violations.is_empty() {
        eprintln!("cost table consistency: ok");
    } else {
        for v in &violations {
            eprintln!("warning: {v}");
        }
    }
    0
}

fn cmd_validate(domain_path: &Path, problem_path: &Path, plan_path: &Path) -> i32 {
    let (domain, problem) = match load_domain_and_problem(domain_path, problem_path) {
        Ok(x) => x,
        Err(c) => return c,
    };
    let plan_text = match read_file(plan_path) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let mut steps = Vec::new();
    for (idx, raw) in plan_text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let name = tokens.next().expect("trimmed non-empty line has a token");
        let args: Vec<&str> = tokens.collect();
        match ground_schema(&domain, &problem, name, &args) {
            Ok(step) => steps.push(step),
            Err(e) => {
                return fail(
                    EXIT_USAGE,
                    format_args!("{}:{}: {e}", plan_path.display(), idx + 1),
                )
            }
        }
    }
    let plan = Plan::new(steps);
    match validate(&problem, &plan) {
        ValidationOutcome::Valid => {
            println!("valid: {} steps", plan.len());
            0
        }
        other => {
            println!("invalid: {other}");
            EXIT_INVALID
        }
    }
}

fn cmd_emit_corpus(out: &Path) -> i32 {
    match kitchen::write_corpus(out) {
        Ok(()) => {
            println!(
                "wrote kitchen.dom, kitchen.views, {} goal problems and a sample plan to {}",
                kitchen::GOAL_SPECS.len(),
                out.display()
            );
            0
        }
        Err(e) => fail(EXIT_USAGE, e),
    }
}
