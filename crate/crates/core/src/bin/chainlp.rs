//! Command-line surface: solve instances, emit reward schedules, compare the
//! proportional mechanism against the optimum, and benchmark the solvers.
//!
//! Exit codes: 0 success, 2 validation error, 3 instance too large for the
//! oracle, 4 equilibrium nonconvergence in `compare`.

use chainlp::fast::solve_fast_with;
use chainlp::gen::{random_lp, WeightModel};
use chainlp::greedy::solve_greedy_with;
use chainlp::io::{
    json_f64, json_f64_array, parse_instance_str, report_base, InstanceData, IoError,
};
use chainlp::model::{LpInstance, Solution, Tolerances};
use chainlp::oracle::{solve_exact, OracleError, RationalInstance, MAX_ORACLE_VARS};
use chainlp::proportional::{compare_mechanisms, EquilibriumError, EquilibriumMethod};
use chainlp::reduction::{build_reward, verify_incentives};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_VALIDATION: u8 = 2;
const EXIT_TOO_LARGE: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;

#[derive(Parser)]
#[command(name = "chainlp", version, about = "Chain-constrained budget LP solver suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Greedy,
    Fast,
    Oracle,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Fast => "fast",
            Algorithm::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightFlag {
    Uniform,
    Mechanism,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write a report.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "fast")]
        algorithm: Algorithm,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the optimal step reward schedule for a mechanism file.
    Reward {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the proportional mechanism against the optimum.
    Compare { path: PathBuf },
    /// Time the solvers on random instances and write a CSV.
    Bench {
        /// Comma-separated instance sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated algorithms to time.
        #[arg(long, value_delimiter = ',', default_values = ["greedy", "fast"])]
        algorithm: Vec<Algorithm>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// How budget weights are drawn.
        #[arg(long, value_enum, default_value = "uniform")]
        weights: WeightFlag,
    },
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("chainlp: error: {message}");
    ExitCode::from(code)
}

fn read_instance(path: &Path) -> Result<chainlp::io::InstanceFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_instance_str(&text).map_err(|e| match e {
        IoError::Json(e) => format!("{}: invalid JSON: {e}", path.display()),
        other => format!("{}: {other}", path.display()),
    })
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn render(map: Map<String, Value>) -> String {
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
    text.push('\n');
    text
}

fn run_algorithm(
    inst: &LpInstance,
    exact: Option<&RationalInstance>,
    algorithm: Algorithm,
    tol: &Tolerances,
) -> Result<Solution, OracleError> {
    match algorithm {
        Algorithm::Greedy => Ok(solve_greedy_with(inst, tol).0),
        Algorithm::Fast => Ok(solve_fast_with(inst, tol)),
        Algorithm::Oracle => {
            let owned;
            let rational = match exact {
                Some(r) => r,
                None => {
                    owned = RationalInstance::from_lp(inst);
                    &owned
                }
            };
            let sol = solve_exact(rational)?;
            Ok(Solution::from_profile(inst, sol.x_f64()))
        }
    }
}

fn cmd_solve(path: &Path, algorithm: Algorithm, out: Option<&Path>) -> ExitCode {
    let tol = Tolerances::from_env();
    let file = match read_instance(path) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let (inst, exact, mech) = match &file.data {
        InstanceData::Lp(lp) => (lp.float.clone(), Some(&lp.exact), None),
        InstanceData::Mechanism(m) => (m.to_lp(), None, Some(m)),
    };
    if algorithm == Algorithm::Oracle && inst.n() > MAX_ORACLE_VARS {
        return fail(
            EXIT_TOO_LARGE,
            format!("n = {} exceeds the oracle limit {MAX_ORACLE_VARS}", inst.n()),
        );
    }
    let solution = match run_algorithm(&inst, exact, algorithm, &tol) {
        Ok(s) => s,
        Err(OracleError::TooLarge { n }) => {
            return fail(EXIT_TOO_LARGE, format!("oracle limit exceeded: n = {n}"))
        }
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    // feasibility gate before anything is written
    if let Err(e) = solution.check_feasible(&inst, &tol) {
        return fail(EXIT_VALIDATION, format!("solver output failed validation: {e}"));
    }

    let x_out = match mech {
        Some(m) => m.restore_order(&solution.x),
        None => solution.x.clone(),
    };
    let mut report = report_base();
    if let Some(name) = &file.name {
        report.insert("name".into(), Value::from(name.clone()));
    }
    report.insert(
        "form".into(),
        Value::from(if mech.is_some() { "mechanism" } else { "lp" }),
    );
    report.insert("n".into(), Value::from(inst.n()));
    report.insert("algorithm".into(), Value::from(algorithm.name()));
    report.insert("objective".into(), json_f64(solution.objective));
    report.insert("budget_used".into(), json_f64(solution.budget_used));
    report.insert("x".into(), json_f64_array(&x_out));
    match write_output(out, &render(report)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_VALIDATION, e),
    }
}

fn cmd_reward(path: &Path, out: Option<&Path>) -> ExitCode {
    let tol = Tolerances::from_env();
    let file = match read_instance(path) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let mech = match &file.data {
        InstanceData::Mechanism(m) => m,
        InstanceData::Lp(_) => {
            return fail(
                EXIT_VALIDATION,
                "the reward command needs the mechanism form {q, B, C}",
            )
        }
    };
    let inst = mech.to_lp();
    let solution = solve_fast_with(&inst, &tol);
    if let Err(e) = solution.check_feasible(&inst, &tol) {
        return fail(EXIT_VALIDATION, format!("solver output failed validation: {e}"));
    }
    let schedule = match build_reward(mech, &solution.x, &tol) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let incentives = verify_incentives(&schedule, mech, &solution.x, &tol);

    let mut report = report_base();
    if let Some(name) = &file.name {
        report.insert("name".into(), Value::from(name.clone()));
    }
    report.insert("n".into(), Value::from(mech.n()));
    report.insert("objective".into(), json_f64(solution.objective));
    report.insert("x".into(), json_f64_array(&mech.restore_order(&solution.x)));
    report.insert(
        "breakpoints".into(),
        Value::Array(
            schedule
                .breakpoints()
                .iter()
                .map(|&(t, level)| Value::Array(vec![json_f64(t), json_f64(level)]))
                .collect(),
        ),
    );
    let mut inc = Map::new();
    inc.insert("all_pass".into(), Value::from(incentives.all_pass()));
    inc.insert("total_payout".into(), json_f64(incentives.total_payout));
    inc.insert(
        "budget_respected".into(),
        Value::from(incentives.budget_respected),
    );
    inc.insert(
        "agents".into(),
        Value::Array(
            incentives
                .agents
                .iter()
                .map(|a| {
                    let mut m = Map::new();
                    m.insert("index".into(), Value::from(a.index));
                    m.insert("utility".into(), json_f64(a.utility));
                    m.insert("best_deviation".into(), json_f64(a.best_deviation));
                    m.insert("deviation_utility".into(), json_f64(a.deviation_utility));
                    m.insert("pass".into(), Value::from(a.pass));
                    Value::Object(m)
                })
                .collect(),
        ),
    );
    report.insert("incentives".into(), Value::Object(inc));
    match write_output(out, &render(report)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_VALIDATION, e),
    }
}

fn cmd_compare(path: &Path) -> ExitCode {
    let file = match read_instance(path) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let mech = match &file.data {
        InstanceData::Mechanism(m) => m,
        InstanceData::Lp(_) => {
            return fail(
                EXIT_VALIDATION,
                "the compare command needs the mechanism form {q, B, C}",
            )
        }
    };
    let report = match compare_mechanisms(mech) {
        Ok(r) => r,
        Err(EquilibriumError::DidNotConverge { iterations, .. }) => {
            return fail(
                EXIT_NO_CONVERGENCE,
                format!("best-response dynamics did not converge within {iterations} iterations"),
            )
        }
        Err(e) => return fail(EXIT_VALIDATION, e),
    };
    let mut out = report_base();
    out.insert("n".into(), Value::from(mech.n()));
    out.insert(
        "method".into(),
        Value::from(match report.equilibrium.method {
            EquilibriumMethod::ClosedForm2Agent => "closed_form_2agent",
            EquilibriumMethod::BestResponse => "best_response",
        }),
    );
    out.insert("converged".into(), Value::from(report.equilibrium.converged));
    out.insert(
        "proportional_x".into(),
        json_f64_array(&mech.restore_order(&report.equilibrium.x)),
    );
    out.insert(
        "proportional_product".into(),
        json_f64(report.proportional_product),
    );
    out.insert("optimal_objective".into(), json_f64(report.optimal_objective));
    out.insert("efficiency_ratio".into(), json_f64(report.ratio));
    out.insert(
        "max_deviation_gain".into(),
        json_f64(report.equilibrium.max_deviation_gain),
    );
    println!("{}", render(out).trim_end());
    ExitCode::SUCCESS
}

fn cmd_bench(
    sizes: &[usize],
    seed: u64,
    algorithms: &[Algorithm],
    csv: Option<&Path>,
    weights: WeightFlag,
) -> ExitCode {
    let tol = Tolerances::from_env();
    let model = match weights {
        WeightFlag::Uniform => WeightModel::Uniform,
        WeightFlag::Mechanism => WeightModel::Mechanism,
    };
    let mut lines = String::from("n,algorithm,seconds,objective\n");
    for &n in sizes {
        if n == 0 {
            return fail(EXIT_VALIDATION, "sizes must be positive");
        }
        // one instance per size, shared by all timed algorithms
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let inst = random_lp(&mut rng, n, model);
        for &algorithm in algorithms {
            if algorithm == Algorithm::Oracle && n > MAX_ORACLE_VARS {
                return fail(
                    EXIT_TOO_LARGE,
                    format!("oracle cannot run at n = {n} (limit {MAX_ORACLE_VARS})"),
                );
            }
            let start = Instant::now();
            let solution = run_algorithm(&inst, None, algorithm, &tol).expect("sizes checked");
            let seconds = start.elapsed().as_secs_f64();
            lines.push_str(&format!(
                "{},{},{:.6},{:.17e}\n",
                n,
                algorithm.name(),
                seconds,
                solution.objective
            ));
        }
    }
    match csv {
        Some(path) => match std::fs::write(path, &lines) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(EXIT_VALIDATION, format!("cannot write {}: {e}", path.display())),
        },
        None => {
            print!("{lines}");
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve {
            path,
            algorithm,
            out,
        } => cmd_solve(&path, algorithm, out.as_deref()),
        Command::Reward { path, out } => cmd_reward(&path, out.as_deref()),
        Command::Compare { path } => cmd_compare(&path),
        Command::Bench {
            sizes,
            seed,
            algorithm,
            csv,
            weights,
        } => cmd_bench(&sizes, seed, &algorithm, csv.as_deref(), weights),
    }
}
