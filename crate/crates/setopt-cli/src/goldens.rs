//! The embedded example corpus: each golden is a problem file plus the
//! verdicts it must reproduce. The runner replays every stored check and
//! reports pass/fail per golden.

use serde::Serialize;

use setopt::cones::{self, Direction, ScalarFunctional};
use setopt::dsl::{self, ProblemFile};
use setopt::geometry;
use setopt::maps::{self, grid_points, SamplingSchedule, ScalarValue, SetValuedMap};
use setopt::optimize::{self, ConstraintSet, PenalizationConfig};
use setopt::subdiff;
use setopt::suites;
use setopt::{LinOp, Result};

pub const GOLDEN_FILES: &[(&str, &str)] = &[
    ("corner_map", include_str!("../goldens/corner_map.json")),
    ("norm_e_r1", include_str!("../goldens/norm_e_r1.json")),
    ("norm_e_r2", include_str!("../goldens/norm_e_r2.json")),
    ("parabola_on_01", include_str!("../goldens/parabola_on_01.json")),
    ("abs_sharp", include_str!("../goldens/abs_sharp.json")),
    (
        "rez_incl_counterexample",
        include_str!("../goldens/rez_incl_counterexample.json"),
    ),
    ("f1_f2_pair", include_str!("../goldens/f1_f2_pair.json")),
];

#[derive(Debug, Clone, Serialize)]
pub struct GoldenOutcome {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<(String, bool)>,
}

pub fn list_names() -> Vec<&'static str> {
    GOLDEN_FILES.iter().map(|(n, _)| *n).collect()
}

pub fn run_all() -> Result<Vec<GoldenOutcome>> {
    let mut out = Vec::new();
    for (name, text) in GOLDEN_FILES {
        let file = dsl::parse(text)?;
        let checks = match *name {
            "corner_map" => corner_map(&file)?,
            "norm_e_r1" => norm_e(&file, 1)?,
            "norm_e_r2" => norm_e(&file, 2)?,
            "parabola_on_01" => parabola_on_01(&file)?,
            "abs_sharp" => abs_sharp(&file)?,
            "rez_incl_counterexample" => rez_incl_counterexample(&file)?,
            "f1_f2_pair" => f1_f2_pair(&file)?,
            _ => unreachable!("unknown golden"),
        };
        let pass = checks.iter().all(|(_, ok)| *ok);
        out.push(GoldenOutcome {
            name: (*name).into(),
            pass,
            checks,
        });
    }
    Ok(out)
}

fn base_point(file: &ProblemFile) -> Vec<f64> {
    file.base_point.clone().unwrap_or_else(|| vec![0.0; file.dim_x])
}

fn constraint_set(file: &ProblemFile, schedule: &SamplingSchedule) -> Result<ConstraintSet> {
    match &file.constraint_set {
        Some(pieces) => ConstraintSet::new(pieces.clone()),
        None => Ok(ConstraintSet::whole_box(&schedule.box_for(file.dim_x))),
    }
}

fn corner_map(file: &ProblemFile) -> Result<Vec<(String, bool)>> {
    let schedule = file.schedule.clone();
    let f = SetValuedMap::from_problem(file, "F")?;
    let x_bar = base_point(file);
    let m = constraint_set(file, &schedule)?;
    let mut checks = Vec::new();
    let lm = optimize::check_l_min(&f, &m, &x_bar, 0.5, 41, &schedule)?;
    checks.push(("l-min accepted at base point".into(), lm.is_accepted()));
    let im = optimize::check_ideal_min(&f, &m, &x_bar, 0.5, 41, &schedule)?;
    checks.push((
        "ideal-min rejected at base point".into(),
        im.status == maps::Status::Rejected,
    ));
    let zero = file.candidates.get("zero").expect("stored candidate");
    let verdict = subdiff::frechet_member(&f, &x_bar, zero, &schedule)?;
    checks.push(("zero operator rejected".into(), verdict.is_rejected()));
    let curve_exact = verdict
        .curve
        .iter()
        .all(|&(r, v)| (v - 2.0 / r).abs() <= 1e-6 * (2.0 / r).max(1.0));
    checks.push(("ratio curve equals 2/r".into(), curve_exact));
    Ok(checks)
}

/// Deterministic covectors in the closed unit ball, plus one outside it.
fn sampled_covectors(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for k in 1..=count {
        let r = k as f64 / count as f64;
        if dim == 1 {
            out.push(vec![if k % 2 == 0 { r } else { -r }]);
        } else {
            let theta = 2.399_963 * k as f64;
            let mut v = vec![0.0; dim];
            v[0] = r * theta.cos();
            v[1] = r * theta.sin();
            out.push(v);
        }
    }
    out
}

fn norm_e(file: &ProblemFile, dim: usize) -> Result<Vec<(String, bool)>> {
    let schedule = file.schedule.clone();
    let f = SetValuedMap::from_problem(file, "F")?;
    let x_bar = base_point(file);
    let cone = file.build_cone()?;
    let e = Direction::in_cone(
        file.direction_e.clone().expect("stored direction"),
        &cone,
    )?;
    let mut checks = Vec::new();
    for (name, t) in &file.candidates {
        let verdict = subdiff::frechet_member(&f, &x_bar, t, &schedule)?;
        let norm: f64 = t.data.iter().map(|c| c * c).sum::<f64>().sqrt();
        let inside = norm <= 1.0 + 1e-12;
        checks.push((
            format!("candidate {name} {}", if inside { "accepted" } else { "rejected" }),
            verdict.is_accepted() == inside && verdict.status != maps::Status::Inconclusive,
        ));
        if inside {
            checks.push((
                format!("dual bound holds for {name}"),
                subdiff::norm_e_dual_bound_check(t, &e, &f.cone, 1e-9),
            ));
        }
    }
    let mut sampled_ok = true;
    for xstar in sampled_covectors(dim, 20) {
        let t = subdiff::phi_e_subgradient_map(&xstar, &e);
        let verdict = subdiff::frechet_member(&f, &x_bar, &t, &schedule)?;
        if !verdict.is_accepted() || !subdiff::norm_e_dual_bound_check(&t, &e, &f.cone, 1e-9) {
            sampled_ok = false;
        }
    }
    checks.push(("20 sampled unit-ball covectors accepted".into(), sampled_ok));
    let mut outside = vec![0.0; dim];
    outside[0] = 1.5;
    let t_out = subdiff::phi_e_subgradient_map(&outside, &e);
    checks.push((
        "covector of norm 1.5 rejected".into(),
        subdiff::frechet_member(&f, &x_bar, &t_out, &schedule)?.is_rejected(),
    ));
    Ok(checks)
}

fn parabola_on_01(file: &ProblemFile) -> Result<Vec<(String, bool)>> {
    let schedule = file.schedule.clone();
    let f = SetValuedMap::from_problem(file, "F")?;
    let m = constraint_set(file, &schedule)?;
    let cone = file.build_cone()?;
    let e = Direction::in_cone(file.direction_e.clone().expect("stored direction"), &cone)?;
    let mut checks = Vec::new();
    let found = optimize::solve_ideal(&f, &m, &schedule, 41)?;
    checks.push((
        "unique ideal point at the origin".into(),
        found.len() == 1 && found[0].0.iter().all(|c| c.abs() < 1e-12),
    ));
    let x_bar = base_point(file);
    let cfg = PenalizationConfig {
        ell: 3.0,
        mu: 0.0,
        e: e.clone(),
        radius: 0.6,
    };
    let rep = optimize::verify_penalization(&f, &m, &x_bar, &cfg, &schedule, 41)?;
    checks.push((
        "penalization clauses (a)(b)(c) accepted".into(),
        rep.constrained_ideal.is_accepted()
            && rep.lipschitz.is_accepted()
            && rep.unconstrained_ideal.is_accepted(),
    ));
    let grid = grid_points(&schedule.box_for(file.dim_x), 41);
    let nc = optimize::necessary_condition_report(&f, &m, &x_bar, &cfg, &schedule, &grid, false)?;
    checks.push((
        "stationarity table feasible at mu = 0".into(),
        nc.overall_feasible,
    ));
    checks.push((
        "zero subgradient accepted at the ideal point".into(),
        subdiff::frechet_member(&f, &x_bar, &LinOp::zero(f.dim_y, f.dim_x), &schedule)?
            .is_accepted(),
    ));
    Ok(checks)
}

fn abs_sharp(file: &ProblemFile) -> Result<Vec<(String, bool)>> {
    let schedule = file.schedule.clone();
    let f = SetValuedMap::from_problem(file, "F")?;
    let m = constraint_set(file, &schedule)?;
    let cone = file.build_cone()?;
    let e = Direction::in_cone(file.direction_e.clone().expect("stored direction"), &cone)?;
    let x_bar = base_point(file);
    let grid = grid_points(&schedule.box_for(file.dim_x), 41);
    let mut checks = Vec::new();
    let zero = file.candidates.get("zero").expect("stored candidate");
    checks.push((
        "zero operator accepted".into(),
        subdiff::frechet_member(&f, &x_bar, zero, &schedule)?.is_accepted(),
    ));
    let mk = |mu: f64| PenalizationConfig {
        ell: 1.0,
        mu,
        e: e.clone(),
        radius: 0.5,
    };
    let feasible = optimize::necessary_condition_report(
        &f, &m, &x_bar, &mk(0.5), &schedule, &grid, false,
    )?;
    checks.push((
        "sharp modulus 0.5 feasible".into(),
        feasible.overall_feasible,
    ));
    let infeasible = optimize::necessary_condition_report(
        &f, &m, &x_bar, &mk(2.0), &schedule, &grid, false,
    )?;
    checks.push((
        "sharp modulus 2 infeasible".into(),
        !infeasible.overall_feasible,
    ));
    Ok(checks)
}

fn rez_incl_counterexample(file: &ProblemFile) -> Result<Vec<(String, bool)>> {
    let x = base_point(file);
    let a = SetValuedMap::from_problem(file, "A")?.eval(&x)?;
    let b = SetValuedMap::from_problem(file, "B")?.eval(&x)?;
    let k = file.build_cone()?;
    let rep = cones::scalarized_inclusion_check(&a, &b, &k, false)?;
    let target = geometry::minkowski(&b, &k.as_set())?;
    let excess = geometry::excess(&a, &target)?.value;
    Ok(vec![
        ("direct inclusion fails".into(), !rep.direct),
        ("scalarized inclusion holds".into(), rep.scalarized),
        ("excess equals one".into(), (excess - 1.0).abs() <= 1e-8),
    ])
}

fn f1_f2_pair(file: &ProblemFile) -> Result<Vec<(String, bool)>> {
    let schedule = file.schedule.clone();
    let f1 = SetValuedMap::from_problem(file, "F1")?;
    let f2 = SetValuedMap::from_problem(file, "F2")?;
    let x_bar = base_point(file);
    let y = ScalarFunctional::unit(&[1.0]).expect("unit functional");
    let minimal = |f: &SetValuedMap| {
        let f = f.clone();
        let y = y.clone();
        move |x: &[f64]| -> Result<f64> {
            Ok(match maps::scalarize(&f, &y, x)? {
                ScalarValue::Finite(v) => v,
                ScalarValue::NegInf => f64::NEG_INFINITY,
            })
        }
    };
    let g1 = minimal(&f1);
    let g2 = minimal(&f2);
    Ok(vec![
        (
            "first map fails lower continuity".into(),
            maps::test_lc(&f1, &x_bar, &schedule)?.is_rejected(),
        ),
        (
            "first minimal function is u.s.c.".into(),
            suites::numeric_usc(&g1, &x_bar, &schedule, 1e-4)?,
        ),
        (
            "second map fails upper continuity".into(),
            maps::test_uc(&f2, &x_bar, &schedule)?.is_rejected(),
        ),
        (
            "second minimal function is l.s.c.".into(),
            suites::numeric_lsc(&g2, &x_bar, &schedule, 1e-4)?,
        ),
    ])
}
