//! Seeded randomized property suites: conic cancellation, scalarized
//! inclusion and its converse, convex-case equivalence, semicontinuity
//! implications, penalization, and the forward scalarization and
//! zero-subgradient consequences of ideal minimality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{self, Direction, PolyCone, ScalarFunctional};
use crate::dsl::{MapExpr, ScalarExpr};
use crate::error::Result;
use crate::geometry::{self, ConicPolytope, Point};
use crate::linalg;
use crate::maps::{
    self, grid_points, scalarize, SamplingSchedule, ScalarValue, SetValuedMap, Status,
};
use crate::optimize::{self, ConstraintSet, PenalizationConfig};
use crate::subdiff::{self, scalar_grid_subdiff};
use crate::LinOp;

/// Outcome of one randomized suite: how many trials ran, how many had their
/// hypothesis satisfied, and every violating instance serialized for triage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    /// Trials where the tested implication's hypothesis held.
    pub applicable: usize,
    pub violations: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str, seed: u64) -> Self {
        SuiteReport {
            name: name.into(),
            seed,
            trials: 0,
            applicable: 0,
            violations: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn orthant(dim: usize) -> PolyCone {
    let mut gens = Vec::new();
    for i in 0..dim {
        let mut g = vec![0.0; dim];
        g[i] = 1.0;
        gens.push(g);
    }
    PolyCone::new(dim, gens).unwrap()
}

fn random_points(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> Vec<Point> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn halfline_map(scalar: ScalarExpr) -> SetValuedMap {
    SetValuedMap::new(
        MapExpr::ScalarDir {
            scalar: Box::new(scalar),
            e: vec![1.0],
        },
        1,
        1,
        orthant(1),
    )
}

/// Cancellation suite: `A+C ⊂ C+B+K` must imply `A ⊂ conv(B)+K` whenever the
/// recession of `C` stays in `K`. Half the instances are built so the
/// hypothesis holds by construction; the rest are free-form.
pub fn radstrom_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("radstrom", seed);
    for trial in 0..trials {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let k = orthant(dim);
        let b_count = rng.gen_range(1..=6);
        let b = ConicPolytope::new(
            dim,
            random_points(&mut rng, dim, b_count),
            Vec::new(),
            false,
        )?;
        let mut c_rays = Vec::new();
        for g in &k.generators {
            if rng.gen_bool(0.4) {
                c_rays.push(linalg::scale(rng.gen_range(0.5..2.0), g));
            }
        }
        let c_count = rng.gen_range(1..=3);
        let c = ConicPolytope::new(
            dim,
            random_points(&mut rng, dim, c_count),
            c_rays,
            false,
        )?;
        let a = if trial % 2 == 0 {
            // Shift some vertices of B into the cone: hypothesis guaranteed.
            let verts: Vec<Point> = b
                .vertices
                .iter()
                .map(|v| {
                    let mut w = v.clone();
                    for (i, g) in k.generators.iter().enumerate() {
                        let s = rng.gen_range(0.0..0.5);
                        for (wj, gj) in w.iter_mut().zip(g) {
                            *wj += s * gj * ((i % 2) as f64 + 0.5);
                        }
                    }
                    w
                })
                .collect();
            ConicPolytope::new(dim, verts, Vec::new(), false)?
        } else {
            let count = rng.gen_range(1..=6);
            ConicPolytope::new(dim, random_points(&mut rng, dim, count), Vec::new(), false)?
        };
        report.trials += 1;
        let rep = subdiff::radstrom_check(&a, &b, &c, &k, 1e-7)?;
        if rep.hypothesis {
            report.applicable += 1;
            if !rep.conclusion {
                report
                    .violations
                    .push(format!("trial {trial}: A={a:?} B={b:?} C={c:?}"));
            }
        }
    }
    Ok(report)
}

/// Scalarized-inclusion suite. Forward on every instance: a direct inclusion
/// must scalarize. Converse on hulled `B`: scalarized must imply direct.
pub fn rez_incl_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("rez-incl", seed);
    for trial in 0..trials {
        let dim = 2;
        let k = orthant(dim);
        let a_count = rng.gen_range(1..=5);
        let a = ConicPolytope::new(
            dim,
            random_points(&mut rng, dim, a_count),
            Vec::new(),
            false,
        )?;
        let b_count = rng.gen_range(1..=5);
        let b = ConicPolytope::new(
            dim,
            random_points(&mut rng, dim, b_count),
            Vec::new(),
            true,
        )?;
        report.trials += 1;
        let rep = cones::scalarized_inclusion_check(&a, &b, &k, false)?;
        if rep.direct && !rep.scalarized {
            report
                .violations
                .push(format!("trial {trial}: direct without scalarized, A={a:?} B={b:?}"));
        }
        if rep.scalarized {
            report.applicable += 1;
            if !rep.direct {
                report
                    .violations
                    .push(format!("trial {trial}: converse failed on hulled B, A={a:?} B={b:?}"));
            }
        }
    }
    Ok(report)
}

/// One convex single-valued instance `F(x) = g(x)·e` with a candidate
/// `T = e ⊗ s` and the ground truth of whether `s` is a subgradient.
pub struct ConvexInstance {
    pub map: SetValuedMap,
    pub x_bar: Point,
    pub t: LinOp,
    pub expect_member: bool,
}

/// `g(x) = a‖x‖² + c|w·x| + b·x`; at the origin the subdifferential is
/// `b + c·[−1,1]·w`.
fn convex_instance(rng: &mut ChaCha8Rng, dim_x: usize) -> ConvexInstance {
    let a = rng.gen_range(0.2..1.5);
    let c = rng.gen_range(0.3..1.0);
    let b: Vec<f64> = (0..dim_x).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let mut w: Vec<f64> = (0..dim_x).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if linalg::norm2(&w) < 0.3 {
        w[0] += 1.0;
    }
    let quad = ScalarExpr::ScaleBy {
        factor: a,
        child: Box::new(ScalarExpr::Mul {
            children: vec![
                ScalarExpr::Norm {
                    center: vec![0.0; dim_x],
                },
                ScalarExpr::Norm {
                    center: vec![0.0; dim_x],
                },
            ],
        }),
    };
    let kink = ScalarExpr::ScaleBy {
        factor: c,
        child: Box::new(ScalarExpr::Max {
            children: vec![
                ScalarExpr::Affine {
                    weights: w.clone(),
                    offset: 0.0,
                },
                ScalarExpr::Affine {
                    weights: linalg::scale(-1.0, &w),
                    offset: 0.0,
                },
            ],
        }),
    };
    let lin = ScalarExpr::Affine {
        weights: b.clone(),
        offset: 0.0,
    };
    let g = ScalarExpr::Sum {
        children: vec![quad, kink, lin],
    };
    let map = SetValuedMap::new(
        MapExpr::ScalarDir {
            scalar: Box::new(g),
            e: vec![1.0],
        },
        dim_x,
        1,
        orthant(1),
    );
    let expect_member = rng.gen_bool(0.5);
    let lambda = if expect_member {
        rng.gen_range(-0.8..0.8)
    } else {
        // Past the subdifferential by a clear margin.
        (1.0 + rng.gen_range(0.5..1.5)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
    };
    let s = linalg::add(&b, &linalg::scale(lambda * c / linalg::norm2(&w), &w));
    // s is a subgradient iff its kink component sits in c·[−1,1]·ŵ.
    let t = LinOp::outer(&[1.0], &s);
    ConvexInstance {
        map,
        x_bar: vec![0.0; dim_x],
        t,
        expect_member,
    }
}

/// Convex equivalence suite: the sampled membership verdict must agree with
/// the global convex-formula check on every instance, with no inconclusives.
pub fn convex_equivalence_suite(
    trials: usize,
    seed: u64,
    schedule: &SamplingSchedule,
) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("convex-equivalence", seed);
    for trial in 0..trials {
        let dim_x = if trial % 2 == 0 { 1 } else { 2 };
        let inst = convex_instance(&mut rng, dim_x);
        let grid = grid_points(&schedule.box_for(dim_x), 21);
        report.trials += 1;
        report.applicable += 1;
        let verdict = subdiff::frechet_member(&inst.map, &inst.x_bar, &inst.t, schedule)?;
        let (formula, _) = subdiff::convex_subdiff_formula_check(
            &inst.map,
            &inst.x_bar,
            &inst.t,
            &grid,
            schedule.accept_tol,
        )?;
        let agree = match verdict.status {
            Status::Accepted => formula,
            Status::Rejected => !formula,
            Status::Inconclusive => false,
        };
        if !agree || verdict.is_accepted() != inst.expect_member {
            report.violations.push(format!(
                "trial {trial}: verdict {:?}, formula {formula}, expected member {}",
                verdict.status, inst.expect_member
            ));
        }
    }
    Ok(report)
}

/// Forward scalarization suite: an accepted operator must stay accepted in
/// every dual-generator scalarization.
pub fn scalarization_suite(
    trials: usize,
    seed: u64,
    schedule: &SamplingSchedule,
) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("scalarization", seed);
    for trial in 0..trials {
        let inst = convex_instance(&mut rng, if trial % 2 == 0 { 1 } else { 2 });
        report.trials += 1;
        if !subdiff::frechet_member(&inst.map, &inst.x_bar, &inst.t, schedule)?.is_accepted() {
            continue;
        }
        report.applicable += 1;
        for y in inst.map.cone.duals() {
            let v = subdiff::scalarization_forward(&inst.map, &inst.x_bar, &inst.t, &y, schedule)?;
            if !v.is_accepted() {
                report.violations.push(format!(
                    "trial {trial}: accepted operator, scalarization {:?} under {:?}",
                    v.status, y.weights
                ));
            }
        }
    }
    Ok(report)
}

/// Numeric lower-semicontinuity test at `x_bar`: over the tail radii of the
/// schedule, the sampled minimum must not drop below `g(x_bar) − tol`.
pub fn numeric_lsc(
    g: &dyn Fn(&[f64]) -> Result<f64>,
    x_bar: &[f64],
    schedule: &SamplingSchedule,
    tol: f64,
) -> Result<bool> {
    let base = g(x_bar)?;
    for &r in schedule.radii.iter().rev().take(3) {
        for x in maps::sphere_samples(x_bar, r, schedule) {
            if g(&x)? < base - tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Numeric upper-semicontinuity test, dual to [`numeric_lsc`].
pub fn numeric_usc(
    g: &dyn Fn(&[f64]) -> Result<f64>,
    x_bar: &[f64],
    schedule: &SamplingSchedule,
    tol: f64,
) -> Result<bool> {
    let base = g(x_bar)?;
    for &r in schedule.radii.iter().rev().take(3) {
        for x in maps::sphere_samples(x_bar, r, schedule) {
            if g(&x)? > base + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn minimal_function<'a>(
    f: &'a SetValuedMap,
    y: &'a ScalarFunctional,
) -> impl Fn(&[f64]) -> Result<f64> + 'a {
    move |x: &[f64]| {
        Ok(match scalarize(f, y, x)? {
            ScalarValue::Finite(v) => v,
            ScalarValue::NegInf => f64::NEG_INFINITY,
        })
    }
}

/// Semicontinuity implication suite: upper continuity of the map forces the
/// minimal functions to be numerically l.s.c., and lower continuity forces
/// them u.s.c. Instances mix smooth maps with jump discontinuities.
pub fn iscusc_suite(trials: usize, seed: u64, schedule: &SamplingSchedule) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("iscusc", seed);
    for trial in 0..trials {
        let f = match trial % 3 {
            0 => {
                let inst = convex_instance(&mut rng, 1);
                inst.map
            }
            1 => {
                // Jump map: value c₁ left of the origin, c₂ at and right of it.
                let c1 = rng.gen_range(-1.0..1.0);
                let c2 = rng.gen_range(-1.0..1.0);
                SetValuedMap::new(
                    MapExpr::Branch {
                        guard: Box::new(ScalarExpr::Coord { index: 0 }),
                        nonneg_child: Box::new(MapExpr::ConstSet {
                            set: ConicPolytope::singleton(vec![c2]),
                        }),
                        neg_child: Box::new(MapExpr::ConstSet {
                            set: ConicPolytope::singleton(vec![c1]),
                        }),
                    },
                    1,
                    1,
                    orthant(1),
                )
            }
            _ => {
                // Segment-valued map translated by an affine function.
                let lo = rng.gen_range(-1.0..0.0);
                let hi = rng.gen_range(0.0..1.0);
                let slope = rng.gen_range(-1.0..1.0);
                let seg =
                    ConicPolytope::new(1, vec![vec![lo], vec![hi]], Vec::new(), true).unwrap();
                SetValuedMap::new(
                    MapExpr::Sum {
                        children: vec![
                            MapExpr::ConstSet { set: seg },
                            MapExpr::AffineArg {
                                t: LinOp::new(1, 1, vec![slope]).unwrap(),
                                b: vec![0.0],
                            },
                        ],
                    },
                    1,
                    1,
                    orthant(1),
                )
            }
        };
        let x_bar = vec![0.0];
        report.trials += 1;
        let uc = maps::test_uc(&f, &x_bar, schedule)?;
        let lc = maps::test_lc(&f, &x_bar, schedule)?;
        for y in f.cone.duals() {
            let g = minimal_function(&f, &y);
            if uc.is_accepted() {
                report.applicable += 1;
                if !numeric_lsc(&g, &x_bar, schedule, 1e-4)? {
                    report
                        .violations
                        .push(format!("trial {trial}: u.c. accepted but minimal fn not l.s.c."));
                }
            }
            if lc.is_accepted() {
                report.applicable += 1;
                if !numeric_usc(&g, &x_bar, schedule, 1e-4)? {
                    report
                        .violations
                        .push(format!("trial {trial}: l.c. accepted but minimal fn not u.s.c."));
                }
            }
        }
    }
    Ok(report)
}

/// Penalization suite: constrained quadratic instances with the penalty
/// modulus above the measured slope bound; ideal minimality on `M` plus the
/// cross-boundary Lipschitz clause must yield unconstrained minimality of the
/// penalized map.
pub fn penalization_suite(
    trials: usize,
    seed: u64,
    schedule: &SamplingSchedule,
) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("penalization", seed);
    for trial in 0..trials {
        let a = rng.gen_range(0.3..1.5);
        // Keep the minimizer on the 41-point grid and inside M.
        let xm = (rng.gen_range(-8..=8) as f64) * 0.05;
        let lo = xm - (rng.gen_range(1..=4) as f64) * 0.05;
        let hi = xm + (rng.gen_range(1..=4) as f64) * 0.05;
        let g = ScalarExpr::ScaleBy {
            factor: a,
            child: Box::new(ScalarExpr::Mul {
                children: vec![
                    ScalarExpr::Norm { center: vec![xm] },
                    ScalarExpr::Norm { center: vec![xm] },
                ],
            }),
        };
        let f = halfline_map(g);
        let m = ConstraintSet::new(vec![ConicPolytope::new(
            1,
            vec![vec![lo.max(-1.0)], vec![hi.min(1.0)]],
            Vec::new(),
            true,
        )?])?;
        // Slope of a(x−xm)² over [−1,1] is at most 4a; stay above it.
        let cfg = PenalizationConfig {
            ell: 4.0 * a + 1.0,
            mu: 0.0,
            e: Direction::in_cone(vec![1.0], &f.cone)?,
            radius: 0.3,
        };
        report.trials += 1;
        let rep = optimize::verify_penalization(&f, &m, &[xm], &cfg, schedule, 41)?;
        if rep.constrained_ideal.is_accepted() && rep.lipschitz.is_accepted() {
            report.applicable += 1;
            if !rep.unconstrained_ideal.is_accepted() {
                report.violations.push(format!(
                    "trial {trial}: a={a} xm={xm} M=[{lo},{hi}]: penalized map lost minimality"
                ));
            }
        }
    }
    Ok(report)
}

/// Consequences of ideal minimality at interior points: the zero operator is
/// an accepted subgradient, and the point is also l-minimal.
pub fn ideal_consequences_suite(
    trials: usize,
    seed: u64,
    schedule: &SamplingSchedule,
) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("ideal-consequences", seed);
    let m = ConstraintSet::whole_box(&[(-1.0, 1.0)]);
    for trial in 0..trials {
        let a = rng.gen_range(0.3..1.5);
        let c = rng.gen_range(0.0..1.0);
        let xm = (rng.gen_range(-10..=10) as f64) * 0.05;
        let g = ScalarExpr::Sum {
            children: vec![
                ScalarExpr::ScaleBy {
                    factor: a,
                    child: Box::new(ScalarExpr::Mul {
                        children: vec![
                            ScalarExpr::Norm { center: vec![xm] },
                            ScalarExpr::Norm { center: vec![xm] },
                        ],
                    }),
                },
                ScalarExpr::ScaleBy {
                    factor: c,
                    child: Box::new(ScalarExpr::Norm { center: vec![xm] }),
                },
            ],
        };
        let f = halfline_map(g);
        report.trials += 1;
        let ideal = optimize::check_ideal_min(&f, &m, &[xm], 0.3, 41, schedule)?;
        if !ideal.is_accepted() {
            continue;
        }
        report.applicable += 1;
        let zero = LinOp::zero(1, 1);
        if !subdiff::frechet_member(&f, &[xm], &zero, schedule)?.is_accepted() {
            report
                .violations
                .push(format!("trial {trial}: ideal accepted but 0 not a subgradient, xm={xm}"));
        }
        if !optimize::check_l_min(&f, &m, &[xm], 0.3, 41, schedule)?.is_accepted() {
            report
                .violations
                .push(format!("trial {trial}: ideal accepted but l-min rejected, xm={xm}"));
        }
    }
    Ok(report)
}

/// Sum-rule suite over convex pairs: the sum of accepted part operators is
/// accepted for the sum map, and the scalarized decomposition is feasible.
pub fn sum_rule_suite(
    trials: usize,
    seed: u64,
    schedule: &SamplingSchedule,
    limiting: bool,
) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let name = if limiting { "sum-lim" } else { "sum-conv" };
    let mut report = SuiteReport::new(name, seed);
    let grid = grid_points(&[(-1.0, 1.0)], 21);
    for trial in 0..trials {
        let b1 = rng.gen_range(-0.5..0.5);
        let b2 = rng.gen_range(-0.5..0.5);
        let a1 = rng.gen_range(0.2..1.0);
        let a2 = rng.gen_range(0.2..1.0);
        let part = |a: f64, b: f64| {
            halfline_map(ScalarExpr::Sum {
                children: vec![
                    ScalarExpr::ScaleBy {
                        factor: a,
                        child: Box::new(ScalarExpr::Mul {
                            children: vec![
                                ScalarExpr::Coord { index: 0 },
                                ScalarExpr::Coord { index: 0 },
                            ],
                        }),
                    },
                    ScalarExpr::Affine {
                        weights: vec![b],
                        offset: 0.0,
                    },
                ],
            })
        };
        let f1 = part(a1, b1);
        let f2 = part(a2, b2);
        let t1 = LinOp::new(1, 1, vec![b1]).unwrap();
        let t2 = LinOp::new(1, 1, vec![b2]).unwrap();
        let t = t1.add(&t2)?;
        report.trials += 1;
        report.applicable += 1;
        if limiting {
            let sum = f1.sum(&f2);
            let (ok, _) = subdiff::limiting_convex_formula_check(
                &sum,
                &[0.0],
                &t,
                &grid,
                schedule.accept_tol,
            )?;
            let gf = |x: &[f64]| {
                Ok(a1 * x[0] * x[0] + b1 * x[0] + a2 * x[0] * x[0] + b2 * x[0])
            };
            let s_sum = scalar_grid_subdiff(&gf, &[0.0], &grid)?;
            let feasible = s_sum.contains(&[b1 + b2], 1e-7);
            if !(ok && feasible) {
                report.violations.push(format!(
                    "trial {trial}: limiting formula {ok}, decomposition {feasible}"
                ));
            }
        } else {
            let rep = subdiff::sum_rule_check(
                &f1,
                &f2,
                &[0.0],
                &t,
                Some((&t1, &t2)),
                schedule,
                &grid,
            )?;
            let decomposed = rep.scalarized_decomposition.iter().all(|(_, ok)| *ok);
            if rep.trivial_inclusion != Some(true) || !decomposed {
                report
                    .violations
                    .push(format!("trial {trial}: sum rule failed, report {rep:?}"));
            }
        }
    }
    Ok(report)
}

/// Difference-rule suite: subtracting a rank-one smooth term and adding it
/// back inside the membership test must stay accepted.
pub fn difference_rule_suite(
    trials: usize,
    seed: u64,
    schedule: &SamplingSchedule,
) -> Result<SuiteReport> {
    let mut rng = rng_for(seed);
    let mut report = SuiteReport::new("diff-rule", seed);
    for trial in 0..trials {
        let a = rng.gen_range(0.2..1.0);
        let b = rng.gen_range(-0.5..0.5);
        let xstar = rng.gen_range(-0.8..0.8);
        // F − φ_e with φ(x) = xstar·x : G = a x² + (b − xstar) x.
        let diff = halfline_map(ScalarExpr::Sum {
            children: vec![
                ScalarExpr::ScaleBy {
                    factor: a,
                    child: Box::new(ScalarExpr::Mul {
                        children: vec![
                            ScalarExpr::Coord { index: 0 },
                            ScalarExpr::Coord { index: 0 },
                        ],
                    }),
                },
                ScalarExpr::Affine {
                    weights: vec![b - xstar],
                    offset: 0.0,
                },
            ],
        });
        // The original map F = a x² + b x; the candidate for F comes back out
        // of the difference candidate via the rank-one correction.
        let f = halfline_map(ScalarExpr::Sum {
            children: vec![
                ScalarExpr::ScaleBy {
                    factor: a,
                    child: Box::new(ScalarExpr::Mul {
                        children: vec![
                            ScalarExpr::Coord { index: 0 },
                            ScalarExpr::Coord { index: 0 },
                        ],
                    }),
                },
                ScalarExpr::Affine {
                    weights: vec![b],
                    offset: 0.0,
                },
            ],
        });
        let e = Direction::in_cone(vec![1.0], &f.cone)?;
        let t_diff = LinOp::new(1, 1, vec![b - xstar]).unwrap();
        let t_phi = subdiff::phi_e_subgradient_map(&[xstar], &e);
        report.trials += 1;
        if !subdiff::frechet_member(&diff, &[0.0], &t_diff, schedule)?.is_accepted() {
            continue;
        }
        report.applicable += 1;
        let status = subdiff::difference_rule_check(&f, &e, &[0.0], &t_diff, &t_phi, schedule)?;
        if status != Status::Accepted {
            report
                .violations
                .push(format!("trial {trial}: difference rule {status:?}, xstar={xstar}"));
        }
    }
    Ok(report)
}

/// The stored jump-map pair behind the semicontinuity lemma: the first map's
/// minimal function is u.s.c. while the map is not lower continuous, and the
/// second's is l.s.c. while the map is not upper continuous.
pub fn iscusc_stored_pair(schedule: &SamplingSchedule) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("iscusc-stored-pair", 0);
    let k = orthant(1);
    let pm_one = ConicPolytope::new(1, vec![vec![-1.0], vec![1.0]], Vec::new(), false)?;
    let f1 = SetValuedMap::new(
        MapExpr::Branch {
            guard: Box::new(ScalarExpr::Mul {
                children: vec![ScalarExpr::Coord { index: 0 }, ScalarExpr::Coord { index: 0 }],
            }),
            nonneg_child: Box::new(MapExpr::ConstSet { set: pm_one }),
            neg_child: Box::new(MapExpr::ConstSet {
                set: ConicPolytope::singleton(vec![0.0]),
            }),
        },
        1,
        1,
        k.clone(),
    );
    let low_pair = ConicPolytope::new(1, vec![vec![-1.0], vec![-0.5]], Vec::new(), false)?;
    let f2 = SetValuedMap::new(
        MapExpr::Branch {
            guard: Box::new(ScalarExpr::Mul {
                children: vec![ScalarExpr::Coord { index: 0 }, ScalarExpr::Coord { index: 0 }],
            }),
            nonneg_child: Box::new(MapExpr::ConstSet {
                set: ConicPolytope::singleton(vec![0.0]),
            }),
            neg_child: Box::new(MapExpr::ConstSet { set: low_pair }),
        },
        1,
        1,
        k,
    );
    let x_bar = vec![0.0];
    let y = ScalarFunctional::unit(&[1.0]).unwrap();
    report.trials = 4;
    report.applicable = 4;
    if !maps::test_lc(&f1, &x_bar, schedule)?.is_rejected() {
        report.violations.push("first map should fail lower continuity".into());
    }
    let g1 = minimal_function(&f1, &y);
    if !numeric_usc(&g1, &x_bar, schedule, 1e-4)? {
        report.violations.push("first minimal function should be u.s.c.".into());
    }
    if !maps::test_uc(&f2, &x_bar, schedule)?.is_rejected() {
        report.violations.push("second map should fail upper continuity".into());
    }
    let g2 = minimal_function(&f2, &y);
    if !numeric_lsc(&g2, &x_bar, schedule, 1e-4)? {
        report.violations.push("second minimal function should be l.s.c.".into());
    }
    Ok(report)
}

/// The non-hulled counterexample to the scalarized-inclusion converse:
/// scalarization succeeds yet the direct inclusion fails, and the exact
/// excess equals one.
pub fn rez_incl_counterexample() -> Result<SuiteReport> {
    let mut report = SuiteReport::new("rez-incl-counterexample", 0);
    let k = orthant(2);
    let a = ConicPolytope::singleton(vec![1.0, 1.0]);
    let b = ConicPolytope::new(
        2,
        vec![vec![2.0, 0.0], vec![0.0, 2.0]],
        Vec::new(),
        false,
    )?;
    report.trials = 1;
    report.applicable = 1;
    let rep = cones::scalarized_inclusion_check(&a, &b, &k, false)?;
    let target = geometry::minkowski(&b, &k.as_set())?;
    let excess = geometry::excess(&a, &target)?.value;
    if rep.direct || !rep.scalarized || (excess - 1.0).abs() > 1e-8 {
        report.violations.push(format!(
            "expected direct=false scalarized=true excess=1, got {rep:?} excess={excess}"
        ));
    }
    Ok(report)
}
