//! Acceptance gate: replays the ten top-level criteria and prints one
//! pass/fail line for each. Tolerances are pinned where each criterion
//! states them; runtime bounds are asserted with wall clocks.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use setopt::cones::{self, Direction, PolyCone};
use setopt::dsl;
use setopt::geometry::{self, ConicPolytope};
use setopt::maps::{grid_points, SamplingSchedule, SetValuedMap};
use setopt::optimize::{self, ConstraintSet, PenalizationConfig};
use setopt::{subdiff, suites, LinOp};

const ACCEPT_TOL: f64 = 1e-6;

struct Gate {
    lines: Vec<(String, bool)>,
}

impl Gate {
    fn new() -> Self {
        Gate { lines: Vec::new() }
    }

    fn record(&mut self, number: usize, label: &str, pass: bool) {
        let line = format!(
            "criterion {number:2}: {} — {label}",
            if pass { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        self.lines.push((line, pass));
    }

    fn finish(self) {
        let failures: Vec<&String> = self
            .lines
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(l, _)| l)
            .collect();
        assert!(failures.is_empty(), "failed criteria:\n{failures:?}");
    }
}

fn orthant(dim: usize) -> PolyCone {
    let gens = (0..dim)
        .map(|i| {
            let mut g = vec![0.0; dim];
            g[i] = 1.0;
            g
        })
        .collect();
    PolyCone::new(dim, gens).unwrap()
}

fn golden(name: &str) -> dsl::ProblemFile {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("goldens")
        .join(format!("{name}.json"));
    dsl::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Brute-force excess oracle for a singleton against a union of translated
/// orthants: dense scan over the cone offsets.
fn brute_force_excess_singleton(a: &[f64], b_vertices: &[Vec<f64>], span: f64, step: f64) -> f64 {
    let mut best = f64::INFINITY;
    for v in b_vertices {
        let mut k0 = 0.0;
        while k0 <= span {
            let mut k1 = 0.0;
            while k1 <= span {
                let dx = a[0] - (v[0] + k0);
                let dy = a[1] - (v[1] + k1);
                best = best.min((dx * dx + dy * dy).sqrt());
                k1 += step;
            }
            k0 += step;
        }
    }
    best
}

#[test]
fn acceptance() {
    let total_clock = Instant::now();
    let mut gate = Gate::new();
    let schedule = SamplingSchedule::default();

    // 1. Scalarized inclusion counterexample with the exact excess value.
    {
        let clock = Instant::now();
        let k = orthant(2);
        let a = ConicPolytope::singleton(vec![1.0, 1.0]);
        let b = ConicPolytope::new(2, vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![], false).unwrap();
        let rep = cones::scalarized_inclusion_check(&a, &b, &k, false).unwrap();
        let target = geometry::minkowski(&b, &k.as_set()).unwrap();
        let excess = geometry::excess(&a, &target).unwrap().value;
        let oracle = brute_force_excess_singleton(&[1.0, 1.0], &b.vertices, 4.0, 1e-3);
        let pass = !rep.direct
            && rep.scalarized
            && (excess - 1.0).abs() <= 1e-8
            && (excess - oracle).abs() <= 1e-3
            && clock.elapsed().as_secs_f64() < 1.0;
        gate.record(
            1,
            "counterexample: direct fails, scalarized holds, excess 1.0 against brute force",
            pass,
        );
    }

    // 2. The piecewise corner map: l-min yes, ideal no, zero operator out.
    {
        let clock = Instant::now();
        let file = golden("corner_map");
        let f = SetValuedMap::from_problem(&file, "F").unwrap();
        let m = ConstraintSet::new(file.constraint_set.clone().unwrap()).unwrap();
        let sched = file.schedule.clone();
        let lm = optimize::check_l_min(&f, &m, &[0.0], 0.5, 41, &sched).unwrap();
        let im = optimize::check_ideal_min(&f, &m, &[0.0], 0.5, 41, &sched).unwrap();
        let zero = file.candidates.get("zero").unwrap();
        let verdict = subdiff::frechet_member(&f, &[0.0], zero, &sched).unwrap();
        let curve_ok = verdict
            .curve
            .iter()
            .all(|&(r, v)| (v * r - 2.0).abs() <= 1e-6);
        let pass = lm.is_accepted()
            && im.status == setopt::maps::Status::Rejected
            && verdict.is_rejected()
            && curve_ok
            && clock.elapsed().as_secs_f64() < 5.0;
        gate.record(
            2,
            "corner map: l-min accepted, ideal rejected, zero operator rejected with 2/r curve",
            pass,
        );
    }

    // 3. Norm-times-direction subgradients in one and two dimensions.
    {
        let mut pass = true;
        for (name, dim) in [("norm_e_r1", 1usize), ("norm_e_r2", 2usize)] {
            let file = golden(name);
            let f = SetValuedMap::from_problem(&file, "F").unwrap();
            let cone = file.build_cone().unwrap();
            let e = Direction::in_cone(file.direction_e.clone().unwrap(), &cone).unwrap();
            let x_bar = vec![0.0; dim];
            for k in 1..=20usize {
                let r = k as f64 / 20.0;
                let xstar = if dim == 1 {
                    vec![if k % 2 == 0 { r } else { -r }]
                } else {
                    let th = 2.399_963 * k as f64;
                    vec![r * th.cos(), r * th.sin()]
                };
                let t = subdiff::phi_e_subgradient_map(&xstar, &e);
                let v = subdiff::frechet_member(&f, &x_bar, &t, &file.schedule).unwrap();
                pass &= v.is_accepted();
                pass &= subdiff::norm_e_dual_bound_check(&t, &e, &f.cone, ACCEPT_TOL);
            }
            let mut outside = vec![0.0; dim];
            outside[0] = 1.5;
            let t_out = subdiff::phi_e_subgradient_map(&outside, &e);
            pass &= subdiff::frechet_member(&f, &x_bar, &t_out, &file.schedule)
                .unwrap()
                .is_rejected();
        }
        gate.record(
            3,
            "norm map: 20 unit-ball covectors accepted with dual bound, norm 1.5 rejected",
            pass,
        );
    }

    // 4. Cancellation property suite.
    {
        let rep = suites::radstrom_suite(500, 20_240_401).unwrap();
        gate.record(
            4,
            "cancellation suite: 500 seeded instances, zero violations",
            rep.passed() && rep.trials == 500 && rep.applicable >= 100,
        );
    }

    // 5. Scalarized-inclusion converse suite plus the stored counterexample.
    {
        let rep = suites::rez_incl_suite(500, 20_240_402).unwrap();
        let stored = suites::rez_incl_counterexample().unwrap();
        gate.record(
            5,
            "converse suite: 500 hulled instances clean, non-hulled counterexample stored",
            rep.passed() && rep.trials == 500 && stored.passed(),
        );
    }

    // 6. Convex equivalence catalog.
    {
        let rep = suites::convex_equivalence_suite(30, 20_240_403, &schedule).unwrap();
        gate.record(
            6,
            "convex catalog: 30 instances, sampled verdict equals global formula, none inconclusive",
            rep.passed() && rep.trials == 30,
        );
    }

    // 7. Semicontinuity implications plus the stored jump-map pair.
    {
        let rep = suites::iscusc_suite(50, 20_240_404, &schedule).unwrap();
        let stored = suites::iscusc_stored_pair(&schedule).unwrap();
        gate.record(
            7,
            "semicontinuity suite: 50 maps clean, stored pair reproduces both failures",
            rep.passed() && rep.trials == 50 && stored.passed(),
        );
    }

    // 8. Penalization suite and the constrained parabola end to end.
    {
        let rep = suites::penalization_suite(100, 20_240_405, &schedule).unwrap();
        let file = golden("parabola_on_01");
        let f = SetValuedMap::from_problem(&file, "F").unwrap();
        let m = ConstraintSet::new(file.constraint_set.clone().unwrap()).unwrap();
        let cone = file.build_cone().unwrap();
        let e = Direction::in_cone(file.direction_e.clone().unwrap(), &cone).unwrap();
        let cfg = PenalizationConfig {
            ell: 3.0,
            mu: 0.0,
            e: e.clone(),
            radius: 0.6,
        };
        let pen = optimize::verify_penalization(&f, &m, &[0.0], &cfg, &file.schedule, 41).unwrap();
        let found = optimize::solve_ideal(&f, &m, &file.schedule, 41).unwrap();

        // Sharp-modulus table on the kinked golden: 0.5 feasible, 2 not.
        let abs_file = golden("abs_sharp");
        let af = SetValuedMap::from_problem(&abs_file, "F").unwrap();
        let am = ConstraintSet::new(abs_file.constraint_set.clone().unwrap()).unwrap();
        let ae = Direction::in_cone(abs_file.direction_e.clone().unwrap(), &cone).unwrap();
        let grid = grid_points(&[(-1.0, 1.0)], 41);
        let mk = |mu: f64| PenalizationConfig {
            ell: 1.0,
            mu,
            e: ae.clone(),
            radius: 0.5,
        };
        let t_ok = optimize::necessary_condition_report(
            &af, &am, &[0.0], &mk(0.5), &schedule, &grid, false,
        )
        .unwrap();
        let t_bad = optimize::necessary_condition_report(
            &af, &am, &[0.0], &mk(2.0), &schedule, &grid, false,
        )
        .unwrap();
        let pass = rep.passed()
            && rep.trials == 100
            && pen.constrained_ideal.is_accepted()
            && pen.lipschitz.is_accepted()
            && pen.unconstrained_ideal.is_accepted()
            && found.len() == 1
            && found[0].0[0].abs() < 1e-12
            && t_ok.overall_feasible
            && !t_bad.overall_feasible;
        gate.record(
            8,
            "penalization: 100 instances clean, parabola end-to-end, moduli 0.5 in / 2 out",
            pass,
        );
    }

    // 9. Interior ideal points carry the zero subgradient.
    {
        let rep = suites::ideal_consequences_suite(50, 20_240_406, &schedule).unwrap();
        let file = golden("parabola_on_01");
        let f = SetValuedMap::from_problem(&file, "F").unwrap();
        let zero_ok = subdiff::frechet_member(&f, &[0.0], &LinOp::zero(1, 1), &file.schedule)
            .unwrap()
            .is_accepted();
        gate.record(
            9,
            "ideal consequences: zero operator accepted at every interior ideal point",
            rep.passed() && rep.applicable >= 25 && zero_ok,
        );
    }

    // 10. Byte-identical reports across runs and parallelism levels.
    {
        let bin = env!("CARGO_BIN_EXE_setopt-cli");
        let run = |threads: &str, out: &str| {
            let status = Command::new(bin)
                .args(["goldens", "--threads", threads, "--out", out])
                .output()
                .expect("golden run");
            assert!(status.status.success(), "goldens run failed");
            std::fs::read(out).unwrap()
        };
        let r1 = run("1", "/tmp/setopt-acceptance-p1.json");
        let r8 = run("8", "/tmp/setopt-acceptance-p8.json");
        let r1b = run("1", "/tmp/setopt-acceptance-p1b.json");
        gate.record(
            10,
            "determinism: identical reports at parallelism 1 and 8 and across repeats",
            r1 == r8 && r1 == r1b,
        );
    }

    assert!(
        total_clock.elapsed().as_secs_f64() < 300.0,
        "acceptance suite exceeded the five-minute budget"
    );
    gate.finish();
}
