//! Command-line front end: subgradient membership checks, lemma verification
//! suites, the ideal-minimum solver with optional penalization, and the
//! embedded golden corpus.
//!
//! Exit codes encode the three-valued verdicts: 0 accepted / all pass,
//! 1 rejected / failures found, 2 inconclusive, 3 and above for usage or
//! data errors.

mod goldens;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use setopt::cones::{self, Direction};
use setopt::dsl::{self, ProblemFile};
use setopt::maps::{grid_points, SamplingSchedule, SetValuedMap, Status};
use setopt::optimize::{self, ConstraintSet, PenalizationConfig};
use setopt::{subdiff, suites};

use report::RunReport;

#[derive(Parser)]
#[command(name = "setopt-cli", version = setopt::VERSION, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report to this path as well as stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Size of the worker pool for grid scans; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Attach wall-clock timings to the report (off by default so that equal
    /// inputs give byte-identical output).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Test a candidate operator for subdifferential membership.
    CheckSubgradient {
        problem: PathBuf,
        #[arg(long)]
        map: String,
        #[arg(long)]
        candidate: String,
        /// Base point as comma-separated coordinates; defaults to the
        /// problem's base point.
        #[arg(long)]
        point: Option<String>,
        /// Check the upper subdifferential instead.
        #[arg(long)]
        upper: bool,
        /// Write the ratio curve as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol_accept: Option<f64>,
        #[arg(long)]
        tol_reject: Option<f64>,
    },
    /// Run a named verification suite (radstrom, rez-incl, sum-conv,
    /// sum-lim, diff-rule, iscusc, scalarization).
    Verify {
        lemma: String,
        /// Verify a stored instance instead of randomized trials
        /// (rez-incl only).
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Scan the feasible grid for ideal minima; optionally verify the
    /// distance penalization and the stationarity table.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        penalize: bool,
        /// Grid points per axis.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Penalty modulus for --penalize.
        #[arg(long, default_value_t = 3.0)]
        ell: f64,
        /// Sharp-minimum modulus for the stationarity table.
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Locality radius for --penalize.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay the embedded example corpus against its stored verdicts.
    Goldens {
        /// Print the corpus names and exit.
        #[arg(long)]
        list: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Clap's own usage exit code collides with the verdict protocol.
            let _ = err.print();
            return ExitCode::from(3);
        }
    };
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("error: worker pool already initialized");
            return ExitCode::from(3);
        }
    }
    let started = Instant::now();
    let outcome = run(&cli.command);
    match outcome {
        Ok((code, mut rep)) => {
            if cli.timings {
                rep.timings_ms = Some(json!({
                    "total": started.elapsed().as_millis() as u64,
                }));
            }
            if rep.emit(cli.out.as_deref()).is_err() {
                eprintln!("error: cannot write report");
                return ExitCode::from(4);
            }
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: &Command) -> Result<(u8, RunReport), String> {
    match command {
        Command::CheckSubgradient {
            problem,
            map,
            candidate,
            point,
            upper,
            csv,
            seed,
            tol_accept,
            tol_reject,
        } => cmd_check_subgradient(
            problem,
            map,
            candidate,
            point.as_deref(),
            *upper,
            csv.as_deref(),
            *seed,
            *tol_accept,
            *tol_reject,
        ),
        Command::Verify {
            lemma,
            problem,
            trials,
            seed,
        } => cmd_verify(lemma, problem.as_deref(), *trials, *seed),
        Command::Solve {
            problem,
            penalize,
            grid,
            ell,
            mu,
            radius,
            seed,
        } => cmd_solve(problem, *penalize, *grid, *ell, *mu, *radius, *seed),
        Command::Goldens { list } => cmd_goldens(*list),
    }
}

struct LoadedProblem {
    file: ProblemFile,
    hash: String,
}

fn load_problem(path: &Path) -> Result<LoadedProblem, String> {
    let bytes = fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| format!("{} is not UTF-8", path.display()))?;
    let file = dsl::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(LoadedProblem {
        file,
        hash: report::hash_bytes(&bytes),
    })
}

fn effective_schedule(
    file: &ProblemFile,
    seed: Option<u64>,
    tol_accept: Option<f64>,
    tol_reject: Option<f64>,
) -> Result<SamplingSchedule, String> {
    let mut schedule = file.schedule.clone();
    if let Some(s) = seed {
        schedule.seed = s;
    }
    if let Some(t) = tol_accept {
        schedule.accept_tol = t;
    }
    if let Some(t) = tol_reject {
        schedule.reject_tol = t;
    }
    schedule.validate().map_err(|e| e.to_string())?;
    Ok(schedule)
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, String> {
    let coords: Result<Vec<f64>, _> = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect();
    let coords = coords.map_err(|e| format!("bad point '{text}': {e}"))?;
    if coords.len() != dim {
        return Err(format!(
            "point '{text}' has {} coordinates, problem needs {dim}",
            coords.len()
        ));
    }
    Ok(coords)
}

fn status_exit(status: Status) -> u8 {
    match status {
        Status::Accepted => 0,
        Status::Rejected => 1,
        Status::Inconclusive => 2,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check_subgradient(
    problem: &Path,
    map: &str,
    candidate: &str,
    point: Option<&str>,
    upper: bool,
    csv: Option<&Path>,
    seed: Option<u64>,
    tol_accept: Option<f64>,
    tol_reject: Option<f64>,
) -> Result<(u8, RunReport), String> {
    let loaded = load_problem(problem)?;
    let file = &loaded.file;
    let schedule = effective_schedule(file, seed, tol_accept, tol_reject)?;
    let f = SetValuedMap::from_problem(file, map).map_err(|e| e.to_string())?;
    let t = file
        .candidates
        .get(candidate)
        .ok_or_else(|| format!("unknown candidate '{candidate}'"))?;
    let x_bar = match point {
        Some(text) => parse_point(text, file.dim_x)?,
        None => file
            .base_point
            .clone()
            .ok_or_else(|| "no --point given and the problem has no base point".to_string())?,
    };
    let verdict = if upper {
        subdiff::upper_frechet_member(&f, &x_bar, t, &schedule)
    } else {
        subdiff::frechet_member(&f, &x_bar, t, &schedule)
    }
    .map_err(|e| e.to_string())?;
    if let Some(path) = csv {
        let text = report::curve_csv(&verdict.curve, verdict.witness.as_deref());
        fs::write(path, text).map_err(|e| format!("cannot write CSV: {e}"))?;
    }
    let mut rep = RunReport::new("check-subgradient");
    rep.problem_hash = Some(loaded.hash);
    rep.config = json!({
        "map": map,
        "candidate": candidate,
        "point": x_bar,
        "upper": upper,
        "seed": schedule.seed,
        "tol_accept": schedule.accept_tol,
        "tol_reject": schedule.reject_tol,
    });
    rep.results = serde_json::to_value(&verdict).map_err(|e| e.to_string())?;
    Ok((status_exit(verdict.status), rep))
}

fn cmd_verify(
    lemma: &str,
    problem: Option<&Path>,
    trials: usize,
    seed: u64,
) -> Result<(u8, RunReport), String> {
    let schedule = SamplingSchedule::default();
    let mut rep = RunReport::new("verify");
    rep.config = json!({
        "lemma": lemma,
        "trials": trials,
        "seed": seed,
    });
    if lemma == "rez-incl" {
        if let Some(path) = problem {
            return verify_rez_incl_stored(path, rep);
        }
    } else if problem.is_some() {
        return Err(format!("--problem is not supported for lemma '{lemma}'"));
    }
    let suite = match lemma {
        "radstrom" => suites::radstrom_suite(trials, seed),
        "rez-incl" => suites::rez_incl_suite(trials, seed),
        "sum-conv" => suites::sum_rule_suite(trials, seed, &schedule, false),
        "sum-lim" => suites::sum_rule_suite(trials, seed, &schedule, true),
        "diff-rule" => suites::difference_rule_suite(trials, seed, &schedule),
        "iscusc" => suites::iscusc_suite(trials, seed, &schedule).and_then(|mut s| {
            let stored = suites::iscusc_stored_pair(&schedule)?;
            s.trials += stored.trials;
            s.applicable += stored.applicable;
            s.violations.extend(stored.violations);
            Ok(s)
        }),
        "scalarization" => suites::scalarization_suite(trials, seed, &schedule),
        other => return Err(format!("unknown lemma '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    let pass = suite.passed();
    rep.results = serde_json::to_value(&suite).map_err(|e| e.to_string())?;
    Ok((u8::from(!pass), rep))
}

/// Stored-instance mode: evaluate maps `A` and `B` at the base point and
/// report the direct and scalarized inclusions side by side. The converse
/// implication only applies to hulled `B`.
fn verify_rez_incl_stored(path: &Path, mut rep: RunReport) -> Result<(u8, RunReport), String> {
    let loaded = load_problem(path)?;
    let file = &loaded.file;
    let x = file.base_point.clone().unwrap_or_else(|| vec![0.0; file.dim_x]);
    let a = SetValuedMap::from_problem(file, "A")
        .and_then(|m| m.eval(&x))
        .map_err(|e| e.to_string())?;
    let b_map = SetValuedMap::from_problem(file, "B").map_err(|e| e.to_string())?;
    let b = b_map.eval(&x).map_err(|e| e.to_string())?;
    let k = file.build_cone().map_err(|e| e.to_string())?;
    let inclusion = cones::scalarized_inclusion_check(&a, &b, &k, false).map_err(|e| e.to_string())?;
    let applicable = b.hulled;
    let violated = applicable && inclusion.scalarized && !inclusion.direct;
    rep.problem_hash = Some(loaded.hash);
    rep.results = json!({
        "direct": inclusion.direct,
        "scalarized": inclusion.scalarized,
        "converse_applicable": applicable,
        "violated": violated,
    });
    Ok((u8::from(violated), rep))
}

fn cmd_solve(
    problem: &Path,
    penalize: bool,
    grid: usize,
    ell: f64,
    mu: f64,
    radius: f64,
    seed: Option<u64>,
) -> Result<(u8, RunReport), String> {
    let loaded = load_problem(problem)?;
    let file = &loaded.file;
    let schedule = effective_schedule(file, seed, None, None)?;
    if penalize && file.constraint_set.is_none() {
        return Err("--penalize needs a constraint set in the problem file".into());
    }
    let map_name = if file.maps.contains_key("F") {
        "F".to_string()
    } else {
        file.maps
            .keys()
            .next()
            .cloned()
            .ok_or_else(|| "problem file defines no maps".to_string())?
    };
    let f = SetValuedMap::from_problem(file, &map_name).map_err(|e| e.to_string())?;
    let bounds = schedule.box_for(file.dim_x);
    let m = match &file.constraint_set {
        Some(pieces) => ConstraintSet::new(pieces.clone()).map_err(|e| e.to_string())?,
        None => ConstraintSet::whole_box(&bounds),
    };
    let ideal = optimize::solve_ideal(&f, &m, &schedule, grid).map_err(|e| e.to_string())?;
    let step = bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (grid - 1) as f64)
        .fold(0.0, f64::max);
    let mut l_min_points = Vec::new();
    for x in m.grid(&bounds, grid).map_err(|e| e.to_string())? {
        match optimize::check_l_min(&f, &m, &x, 2.5 * step, grid, &schedule) {
            Ok(r) if r.is_accepted() => l_min_points.push(x),
            Ok(_) => {}
            Err(setopt::Error::EmptyLocalGrid) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    let mut results = json!({
        "map": map_name,
        "ideal_points": ideal.iter().map(|(x, _)| x.clone()).collect::<Vec<_>>(),
        "l_min_points": l_min_points,
    });
    if penalize {
        let cone = file.build_cone().map_err(|e| e.to_string())?;
        let e_vec = file
            .direction_e
            .clone()
            .unwrap_or_else(|| cone.generators[0].clone());
        let e = Direction::in_cone(e_vec, &cone).map_err(|e| e.to_string())?;
        let x_bar = match &file.base_point {
            Some(p) => p.clone(),
            None => ideal
                .first()
                .map(|(x, _)| x.clone())
                .ok_or_else(|| "no base point and no ideal point to penalize at".to_string())?,
        };
        let cfg = PenalizationConfig {
            ell,
            mu,
            e,
            radius,
        };
        let pen = optimize::verify_penalization(&f, &m, &x_bar, &cfg, &schedule, grid)
            .map_err(|e| e.to_string())?;
        let domain_grid = grid_points(&bounds, grid);
        let table =
            optimize::necessary_condition_report(&f, &m, &x_bar, &cfg, &schedule, &domain_grid, false)
                .map_err(|e| e.to_string())?;
        results["penalization"] = serde_json::to_value(&pen).map_err(|e| e.to_string())?;
        results["stationarity"] = serde_json::to_value(&table).map_err(|e| e.to_string())?;
    }
    let mut rep = RunReport::new("solve");
    rep.problem_hash = Some(loaded.hash);
    rep.config = json!({
        "grid": grid,
        "penalize": penalize,
        "ell": ell,
        "mu": mu,
        "radius": radius,
        "seed": schedule.seed,
    });
    rep.results = results;
    Ok((0, rep))
}

fn cmd_goldens(list: bool) -> Result<(u8, RunReport), String> {
    let mut rep = RunReport::new("goldens");
    rep.config = json!({ "list": list });
    if list {
        let names = goldens::list_names();
        for name in &names {
            println!("{name}");
        }
        rep.results = json!({ "names": names });
        return Ok((0, rep));
    }
    let outcomes = goldens::run_all().map_err(|e| e.to_string())?;
    let all_pass = outcomes.iter().all(|o| o.pass);
    rep.results = serde_json::to_value(&outcomes).map_err(|e| e.to_string())?;
    Ok((u8::from(!all_pass), rep))
}
