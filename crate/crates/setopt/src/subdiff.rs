//! Subdifferential membership tests for set-valued maps and the calculus-rule
//! verifiers built on them.
//!
//! Membership of an operator `T` in the (Fréchet, upper, limiting)
//! subdifferential is semi-decidable at best, so every test returns a
//! three-valued verdict with its measured ratio curve. The excess functional
//! on epigraphical values is the only primitive: `worst_ratio(r)` is the max
//! over sphere samples `x` at radius `r` of
//! `e(Epi F(x), Epi F(x̄) + T(x − x̄)) / r`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::{self, Direction, PolyCone, ScalarFunctional};
use crate::error::{Error, Result};
use crate::geometry::{self, ConicPolytope, Point};
use crate::kernel::lp;
use crate::linalg;
use crate::linop::LinOp;
use crate::maps::{
    scalarize, sphere_samples, verdict_from_curve, SamplingSchedule, ScalarValue,
    SetValuedMap, Status, Verdict,
};

/// Cap applied to curve values so that infinite excess stays serializable.
const RATIO_CAP: f64 = 1e18;

/// Fréchet subdifferential membership `T ∈ ∂̂F(x̄)`.
pub fn frechet_member(
    f: &SetValuedMap,
    x_bar: &[f64],
    t: &LinOp,
    schedule: &SamplingSchedule,
) -> Result<Verdict> {
    ratio_test(f, x_bar, t, schedule, false)
}

/// Upper subdifferential membership: excess arguments swapped.
pub fn upper_frechet_member(
    f: &SetValuedMap,
    x_bar: &[f64],
    t: &LinOp,
    schedule: &SamplingSchedule,
) -> Result<Verdict> {
    ratio_test(f, x_bar, t, schedule, true)
}

fn ratio_test(
    f: &SetValuedMap,
    x_bar: &[f64],
    t: &LinOp,
    schedule: &SamplingSchedule,
    upper: bool,
) -> Result<Verdict> {
    if x_bar.len() != f.dim_x {
        return Err(Error::DimensionMismatch {
            context: "frechet base point",
            expected: f.dim_x,
            got: x_bar.len(),
        });
    }
    let base = f.eval_epi(x_bar)?;
    let mut curve = Vec::with_capacity(schedule.radii.len());
    let mut witness: Option<Point> = None;
    for &r in &schedule.radii {
        let samples = sphere_samples(x_bar, r, schedule);
        let vals: Vec<Result<f64>> = samples
            .par_iter()
            .map(|x| {
                let step = linalg::sub(x, x_bar);
                let shift = ConicPolytope::singleton(t.apply(&step));
                let target = geometry::minkowski(&base, &shift)?;
                let value = f.eval_epi(x)?;
                let e = if upper {
                    geometry::excess(&target, &value)?
                } else {
                    geometry::excess(&value, &target)?
                };
                Ok((e.value / r).min(RATIO_CAP))
            })
            .collect();
        let mut worst = 0.0;
        let mut worst_idx = None;
        for (i, v) in vals.into_iter().enumerate() {
            let v = v?;
            if v > worst {
                worst = v;
                worst_idx = Some(i);
            }
        }
        if let Some(i) = worst_idx {
            witness = Some(samples[i].clone());
        }
        curve.push((r, worst));
    }
    Ok(verdict_from_curve(curve, witness, schedule))
}

/// Scalarized forward test: the 1-D ratio test of
/// `y*∘T ∈ ∂̂(y*∘F)(x̄)` through the minimal function of `F` under `y*`.
pub fn scalarization_forward(
    f: &SetValuedMap,
    x_bar: &[f64],
    t: &LinOp,
    y: &ScalarFunctional,
    schedule: &SamplingSchedule,
) -> Result<Verdict> {
    let yt = t.compose_functional(&y.weights);
    let f_base = match scalarize(f, y, x_bar)? {
        ScalarValue::Finite(v) => v,
        ScalarValue::NegInf => {
            return Ok(Verdict {
                status: Status::Rejected,
                curve: vec![(schedule.radii[0], RATIO_CAP)],
                witness: Some(x_bar.to_vec()),
            })
        }
    };
    let mut curve = Vec::with_capacity(schedule.radii.len());
    let mut witness = None;
    for &r in &schedule.radii {
        let samples = sphere_samples(x_bar, r, schedule);
        let mut worst = 0.0;
        for x in &samples {
            let step = linalg::sub(x, x_bar);
            let fx = match scalarize(f, y, x)? {
                ScalarValue::Finite(v) => v,
                ScalarValue::NegInf => RATIO_CAP * r,
            };
            // Shortfall of the subgradient inequality at x, scaled by r.
            let v = ((f_base + linalg::dot(&yt, &step) - fx) / r).max(0.0);
            if v > worst {
                worst = v.min(RATIO_CAP);
                witness = Some(x.clone());
            }
        }
        curve.push((r, worst));
    }
    Ok(verdict_from_curve(curve, witness, schedule))
}

/// Global convex-case formula: `F(x) ⊂ F(x̄) + T(x−x̄) + K` on every grid
/// point. Exact characterization of subdifferential membership for upper
/// K-convex maps; returns the first violating grid point if any.
pub fn convex_subdiff_formula_check(
    f: &SetValuedMap,
    x_bar: &[f64],
    t: &LinOp,
    grid: &[Point],
    tol: f64,
) -> Result<(bool, Option<Point>)> {
    let base = f.eval(x_bar)?;
    let k_set = f.cone.as_set();
    for x in grid {
        let step = linalg::sub(x, x_bar);
        let shift = ConicPolytope::singleton(t.apply(&step));
        let target = geometry::minkowski(&geometry::minkowski(&base, &shift)?, &k_set)?;
        let e = geometry::excess(&f.eval(x)?, &target)?;
        if !(e.value <= tol) {
            return Ok((false, Some(x.clone())));
        }
    }
    Ok((true, None))
}

/// Named alias: the limiting subdifferential coincides with the Fréchet one
/// under upper K-convexity, through the same global inclusion.
pub fn limiting_convex_formula_check(
    f: &SetValuedMap,
    x_bar: &[f64],
    t: &LinOp,
    grid: &[Point],
    tol: f64,
) -> Result<(bool, Option<Point>)> {
    convex_subdiff_formula_check(f, x_bar, t, grid, tol)
}

/// Grid H-representation of a scalar subdifferential at `x_bar`: one
/// halfspace `s·(x−x̄) ≤ f(x)−f(x̄)` per grid point. Over-approximates the
/// subdifferential of a convex function; shrinks under grid refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarSubdiffPoly {
    /// `(normal, offset)` pairs meaning `normal · s <= offset`.
    pub halfspaces: Vec<(Vec<f64>, f64)>,
    pub dim: usize,
    pub grid_step: f64,
}

impl ScalarSubdiffPoly {
    pub fn contains(&self, s: &[f64], tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|(n, o)| linalg::dot(n, s) <= o + tol)
    }

    /// Containment of one H-polytope in another, via per-halfspace LP
    /// maximization over `self`.
    pub fn subset_of(&self, other: &ScalarSubdiffPoly, tol: f64) -> bool {
        for (n, o) in &other.halfspaces {
            match maximize_over(self, n) {
                Some(v) => {
                    if v > o + tol {
                        return false;
                    }
                }
                None => return false, // unbounded in this direction
            }
        }
        true
    }
}

/// `max n·s` over the polyhedron, `None` when unbounded.
fn maximize_over(poly: &ScalarSubdiffPoly, n: &[f64]) -> Option<f64> {
    // Free variables split as s = sp - sm.
    let d = poly.dim;
    let nv = 2 * d;
    let mut obj = vec![0.0; nv];
    for i in 0..d {
        obj[i] = -n[i];
        obj[d + i] = n[i];
    }
    let mut prob = lp::Lp::minimize(nv, obj);
    for (normal, offset) in &poly.halfspaces {
        let mut row = vec![0.0; nv];
        for i in 0..d {
            row[i] = normal[i];
            row[d + i] = -normal[i];
        }
        prob.push_le(row, *offset);
    }
    match lp::solve(&prob) {
        lp::LpOutcome::Optimal { value, .. } => Some(-value),
        lp::LpOutcome::Unbounded => None,
        lp::LpOutcome::Infeasible => Some(f64::NEG_INFINITY),
    }
}

/// Build the grid subdifferential of a scalar function given by a closure.
pub fn scalar_grid_subdiff(
    f: &dyn Fn(&[f64]) -> Result<f64>,
    x_bar: &[f64],
    grid: &[Point],
) -> Result<ScalarSubdiffPoly> {
    let f_base = f(x_bar)?;
    let mut halfspaces = Vec::new();
    let mut step = f64::INFINITY;
    for x in grid {
        let n = linalg::sub(x, x_bar);
        let d = linalg::norm2(&n);
        if d <= 1e-12 {
            continue;
        }
        step = step.min(d);
        halfspaces.push((n, f(x)? - f_base));
    }
    Ok(ScalarSubdiffPoly {
        halfspaces,
        dim: x_bar.len(),
        grid_step: if step.is_finite() { step } else { 0.0 },
    })
}

/// LP feasibility of `target ∈ A ⊕ B` for two H-polytopes.
pub fn minkowski_pair_feasible(
    target: &[f64],
    a: &ScalarSubdiffPoly,
    b: &ScalarSubdiffPoly,
) -> bool {
    let d = target.len();
    // Variables: s1p, s1m, s2p, s2m (each length d), all nonnegative.
    let nv = 4 * d;
    let mut prob = lp::Lp::feasibility(nv);
    let put = |row: &mut Vec<f64>, base: usize, normal: &[f64], sign: f64| {
        for i in 0..d {
            row[base + i] = sign * normal[i];
            row[base + d + i] = -sign * normal[i];
        }
    };
    for (n, o) in &a.halfspaces {
        let mut row = vec![0.0; nv];
        put(&mut row, 0, n, 1.0);
        prob.push_le(row, *o);
    }
    for (n, o) in &b.halfspaces {
        let mut row = vec![0.0; nv];
        put(&mut row, 2 * d, n, 1.0);
        prob.push_le(row, *o);
    }
    for i in 0..d {
        let mut row = vec![0.0; nv];
        row[i] = 1.0;
        row[d + i] = -1.0;
        row[2 * d + i] = 1.0;
        row[3 * d + i] = -1.0;
        prob.push_eq(row, target[i]);
    }
    lp::feasible(&prob).is_some()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRuleReport {
    /// `T₁+T₂` accepted for the sum map, given `T₁, T₂` accepted for the
    /// parts; absent when no part candidates were supplied.
    pub trivial_inclusion: Option<bool>,
    /// Per dual generator: feasibility of `y*∘T ∈ S₁ ⊕ S₂`.
    pub scalarized_decomposition: Vec<(Vec<f64>, bool)>,
}

/// Verify the sum-rule decompositions for `T ∈ ∂̂(F₁+F₂)(x̄)`.
pub fn sum_rule_check(
    f1: &SetValuedMap,
    f2: &SetValuedMap,
    x_bar: &[f64],
    t: &LinOp,
    parts: Option<(&LinOp, &LinOp)>,
    schedule: &SamplingSchedule,
    grid: &[Point],
) -> Result<SumRuleReport> {
    let sum = f1.sum(f2);
    let whole = frechet_member(&sum, x_bar, t, schedule)?;
    if !whole.is_accepted() {
        return Err(Error::PreconditionFailed(
            "candidate operator is not an accepted subgradient of the sum map".into(),
        ));
    }
    let trivial_inclusion = match parts {
        Some((t1, t2)) => {
            let ok1 = frechet_member(f1, x_bar, t1, schedule)?.is_accepted();
            let ok2 = frechet_member(f2, x_bar, t2, schedule)?.is_accepted();
            if ok1 && ok2 {
                let ts = t1.add(t2)?;
                Some(frechet_member(&sum, x_bar, &ts, schedule)?.is_accepted())
            } else {
                None
            }
        }
        None => None,
    };
    let mut scalarized_decomposition = Vec::new();
    for y in f1.cone.duals() {
        let g1 = |x: &[f64]| -> Result<f64> {
            scalarize(f1, &y, x)?.finite().ok_or_else(|| {
                Error::PreconditionFailed("scalarization unbounded below".into())
            })
        };
        let g2 = |x: &[f64]| -> Result<f64> {
            scalarize(f2, &y, x)?.finite().ok_or_else(|| {
                Error::PreconditionFailed("scalarization unbounded below".into())
            })
        };
        let s1 = scalar_grid_subdiff(&g1, x_bar, grid)?;
        let s2 = scalar_grid_subdiff(&g2, x_bar, grid)?;
        let target = t.compose_functional(&y.weights);
        let ok = minkowski_pair_feasible(&target, &s1, &s2);
        scalarized_decomposition.push((y.weights.clone(), ok));
    }
    Ok(SumRuleReport {
        trivial_inclusion,
        scalarized_decomposition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadstromReport {
    pub hypothesis: bool,
    pub conclusion: bool,
}

/// Conic cancellation: `A+C ⊂ C+B+K` (hypothesis) against
/// `A ⊂ conv(B)+K` (conclusion). The cancellation lemma asserts
/// hypothesis ⟹ conclusion when the recession of `C` stays inside `K`.
pub fn radstrom_check(
    a: &ConicPolytope,
    b: &ConicPolytope,
    c: &ConicPolytope,
    k: &PolyCone,
    tol: f64,
) -> Result<RadstromReport> {
    if !c.recession_within(&k.generators) {
        return Err(Error::PreconditionFailed(
            "cancellation set C must have recession inside K".into(),
        ));
    }
    let left = geometry::minkowski(a, c)?;
    let right = geometry::minkowski(&geometry::minkowski(c, b)?, &k.as_set())?;
    let hypothesis = geometry::excess(&left, &right)?.value <= tol;
    let target = geometry::minkowski(&b.with_hull(), &k.as_set())?;
    let mut conclusion = a.recession_within(&target.rays);
    if conclusion {
        for v in &a.vertices {
            if !target.member(v, tol)? {
                conclusion = false;
                break;
            }
        }
    }
    Ok(RadstromReport {
        hypothesis,
        conclusion,
    })
}

/// A certificate for limiting-subdifferential membership: Fréchet subgradients
/// along a sequence converging epigraphically to the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitWitness {
    pub sequence: Vec<(Point, LinOp)>,
    pub target_x: Point,
    pub target_t: LinOp,
}

/// Verify a limiting-membership certificate: (a) each sequence element is an
/// accepted Fréchet subgradient, (b) the epigraphical excess to the base point
/// vanishes, (c) the operators converge entrywise (which is operator
/// convergence in finite dimensions).
pub fn limiting_member_verify(
    f: &SetValuedMap,
    witness: &LimitWitness,
    schedule: &SamplingSchedule,
) -> Result<Verdict> {
    if witness.sequence.len() < 5 {
        return Err(Error::PreconditionFailed(
            "limit certificate needs at least 5 elements".into(),
        ));
    }
    let dists: Vec<f64> = witness
        .sequence
        .iter()
        .map(|(x, _)| linalg::dist2(x, &witness.target_x))
        .collect();
    let tail = *dists.last().unwrap();
    if tail > 1e-4 || dists.windows(2).any(|w| w[1] > w[0] + 1e-12) {
        return Err(Error::NonConvergentWitness);
    }
    let base = f.eval_epi(&witness.target_x)?;
    let mut curve = Vec::new();
    let mut any_inconclusive = false;
    let mut reject_witness = None;
    for (x, t_n) in &witness.sequence {
        let v = frechet_member(f, x, t_n, schedule)?;
        match v.status {
            Status::Rejected => {
                return Ok(Verdict {
                    status: Status::Rejected,
                    curve: v.curve,
                    witness: Some(x.clone()),
                });
            }
            Status::Inconclusive => {
                any_inconclusive = true;
                reject_witness = Some(x.clone());
            }
            Status::Accepted => {}
        }
        let exc = geometry::excess(&f.eval_epi(x)?, &base)?;
        let drift = witness.target_t.max_abs_diff(t_n);
        curve.push((
            linalg::dist2(x, &witness.target_x).max(1e-300),
            exc.value.max(drift).min(RATIO_CAP),
        ));
    }
    let last = curve.last().map(|&(_, v)| v).unwrap_or(RATIO_CAP);
    let n = curve.len();
    let tail_ok = last <= schedule.accept_tol
        && curve[n / 2..]
            .windows(2)
            .all(|w| w[1].1 <= w[0].1.max(schedule.accept_tol) + 1e-12);
    let status = if last >= schedule.reject_tol {
        Status::Rejected
    } else if any_inconclusive || !tail_ok {
        Status::Inconclusive
    } else {
        Status::Accepted
    };
    Ok(Verdict {
        status,
        curve,
        witness: if status == Status::Accepted {
            None
        } else {
            reject_witness.or_else(|| witness.sequence.last().map(|(x, _)| x.clone()))
        },
    })
}

/// The rank-one operator `x ↦ (x*·x) e`.
pub fn phi_e_subgradient_map(xstar: &[f64], e: &Direction) -> LinOp {
    LinOp::outer(&e.vector, xstar)
}

/// Dual bound for subgradients of `‖·‖e` at the origin: for every dual
/// generator pairing with `e`, `‖y*∘T‖ ≤ y*(e)` up to `tol`.
pub fn norm_e_dual_bound_check(t: &LinOp, e: &Direction, k: &PolyCone, tol: f64) -> bool {
    for y in k.duals() {
        let ye = y.eval(&e.vector);
        if ye.abs() <= 1e-12 {
            continue;
        }
        let row = t.compose_functional(&y.weights);
        if linalg::norm2(&row) > ye + tol {
            return false;
        }
    }
    true
}

/// Difference rule conclusion: for each dual generator pairing with `e`,
/// `T + y*(e)⁻¹ (y*∘t) e` must be an accepted Fréchet subgradient of `F`.
pub fn difference_rule_check(
    f: &SetValuedMap,
    e: &Direction,
    x_bar: &[f64],
    t_diff: &LinOp,
    t_phi: &LinOp,
    schedule: &SamplingSchedule,
) -> Result<Status> {
    let duals = cones::k_e_plus(&f.cone, e, 1e-9)?;
    let mut any_inconclusive = false;
    for y in duals {
        let ye = y.eval(&e.vector);
        let row = t_phi.compose_functional(&y.weights);
        let addition = LinOp::outer(&e.vector, &linalg::scale(1.0 / ye, &row));
        let candidate = t_diff.add(&addition)?;
        match frechet_member(f, x_bar, &candidate, schedule)?.status {
            Status::Rejected => return Ok(Status::Rejected),
            Status::Inconclusive => any_inconclusive = true,
            Status::Accepted => {}
        }
    }
    Ok(if any_inconclusive {
        Status::Inconclusive
    } else {
        Status::Accepted
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{MapExpr, ScalarExpr};
    use crate::maps;

    fn halfline() -> PolyCone {
        PolyCone::new(1, vec![vec![1.0]]).unwrap()
    }

    fn quadrant() -> PolyCone {
        PolyCone::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    /// F(x) = {|x| e} from R^1 into R^dim_y.
    fn abs_map(e: Vec<f64>, cone: PolyCone) -> SetValuedMap {
        let dim_y = e.len();
        SetValuedMap::new(
            MapExpr::ScalarDir {
                scalar: Box::new(ScalarExpr::Norm { center: vec![0.0] }),
                e,
            },
            1,
            dim_y,
            cone,
        )
    }

    /// F(x) = {x^2 e} in R^1.
    fn square_map(cone: PolyCone) -> SetValuedMap {
        SetValuedMap::new(
            MapExpr::ScalarDir {
                scalar: Box::new(ScalarExpr::Mul {
                    children: vec![
                        ScalarExpr::Coord { index: 0 },
                        ScalarExpr::Coord { index: 0 },
                    ],
                }),
                e: vec![1.0],
            },
            1,
            1,
            cone,
        )
    }

    /// The piecewise map {x} x [-2, inf) for x > 0, {0} x [0, inf) else.
    fn corner_map() -> SetValuedMap {
        let pos = MapExpr::Sum {
            children: vec![
                MapExpr::AffineArg {
                    t: LinOp::new(2, 1, vec![1.0, 0.0]).unwrap(),
                    b: vec![0.0, -2.0],
                },
                MapExpr::ConstSet {
                    set: ConicPolytope::new(2, vec![vec![0.0, 0.0]], vec![vec![0.0, 1.0]], false)
                        .unwrap(),
                },
            ],
        };
        let neg = MapExpr::ConstSet {
            set: ConicPolytope::new(2, vec![vec![0.0, 0.0]], vec![vec![0.0, 1.0]], false).unwrap(),
        };
        SetValuedMap::new(
            MapExpr::Branch {
                guard: Box::new(ScalarExpr::Coord { index: 0 }),
                nonneg_child: Box::new(pos),
                neg_child: Box::new(neg),
            },
            1,
            2,
            quadrant(),
        )
    }

    #[test]
    fn zero_in_frechet_of_abs() {
        let f = abs_map(vec![1.0], halfline());
        let s = SamplingSchedule::default();
        let v = frechet_member(&f, &[0.0], &LinOp::zero(1, 1), &s).unwrap();
        assert!(v.is_accepted());
        assert!(v.curve.iter().all(|&(_, w)| w == 0.0));
    }

    #[test]
    fn corner_map_rejects_zero_with_curve_two_over_r() {
        let f = corner_map();
        let s = SamplingSchedule::default();
        let v = frechet_member(&f, &[0.0], &LinOp::zero(2, 1), &s).unwrap();
        assert!(v.is_rejected());
        for &(r, w) in &v.curve {
            assert!((w - 2.0 / r).abs() <= 1e-6 * (2.0 / r), "r={r} w={w}");
        }
        assert!(v.witness.is_some());
    }

    #[test]
    fn norm_e_interior_subgradients() {
        let f = abs_map(vec![1.0], halfline());
        let s = SamplingSchedule::default();
        let t = LinOp::new(1, 1, vec![0.5]).unwrap();
        assert!(frechet_member(&f, &[0.0], &t, &s).unwrap().is_accepted());
        let too_big = LinOp::new(1, 1, vec![1.5]).unwrap();
        assert!(frechet_member(&f, &[0.0], &too_big, &s)
            .unwrap()
            .is_rejected());
    }

    #[test]
    fn upper_member_of_concave_abs() {
        let minus = SetValuedMap::new(
            MapExpr::ScalarDir {
                scalar: Box::new(ScalarExpr::ScaleBy {
                    factor: -1.0,
                    child: Box::new(ScalarExpr::Norm { center: vec![0.0] }),
                }),
                e: vec![1.0],
            },
            1,
            1,
            halfline(),
        );
        let s = SamplingSchedule::default();
        assert!(upper_frechet_member(&minus, &[0.0], &LinOp::zero(1, 1), &s)
            .unwrap()
            .is_accepted());
        let plus = abs_map(vec![1.0], halfline());
        assert!(upper_frechet_member(&plus, &[0.0], &LinOp::zero(1, 1), &s)
            .unwrap()
            .is_rejected());
    }

    #[test]
    fn constant_map_upper_accepts_zero() {
        let set = ConicPolytope::singleton(vec![3.0]);
        let f = SetValuedMap::new(MapExpr::ConstSet { set }, 1, 1, halfline());
        let s = SamplingSchedule::default();
        assert!(upper_frechet_member(&f, &[0.0], &LinOp::zero(1, 1), &s)
            .unwrap()
            .is_accepted());
    }

    #[test]
    fn scalarization_forward_on_corner_map() {
        let f = corner_map();
        let s = SamplingSchedule::default();
        let y = ScalarFunctional::new(vec![0.0, 1.0]);
        let v = scalarization_forward(&f, &[0.0], &LinOp::zero(2, 1), &y, &s).unwrap();
        assert!(v.is_rejected(), "scalar min drops by 2 on the right branch");
        let yx = ScalarFunctional::new(vec![1.0, 0.0]);
        let vx = scalarization_forward(&f, &[0.0], &LinOp::zero(2, 1), &yx, &s).unwrap();
        assert!(vx.is_accepted(), "first coordinate min is x >= 0");
    }

    #[test]
    fn convex_formula_tangent_cases() {
        let f = square_map(halfline());
        let grid = maps::grid_points(&[(-2.0, 2.0)], 81);
        let tol = 1e-6;
        let t0 = LinOp::zero(1, 1);
        assert!(convex_subdiff_formula_check(&f, &[0.0], &t0, &grid, tol)
            .unwrap()
            .0);
        let tangent = LinOp::new(1, 1, vec![2.0]).unwrap();
        assert!(
            convex_subdiff_formula_check(&f, &[1.0], &tangent, &grid, tol)
                .unwrap()
                .0
        );
        let steep = LinOp::new(1, 1, vec![3.0]).unwrap();
        let (ok, w) = convex_subdiff_formula_check(&f, &[1.0], &steep, &grid, tol).unwrap();
        assert!(!ok);
        // x^2 >= 1 + 3(x-1) fails strictly between 1 and 2.
        let w = w.unwrap();
        assert!(w[0] > 1.0 && w[0] < 2.0, "witness {w:?}");
    }

    #[test]
    fn grid_subdiff_of_abs_and_square() {
        let grid = maps::grid_points(&[(-1.0, 1.0)], 41);
        let abs = |x: &[f64]| -> Result<f64> { Ok(x[0].abs()) };
        let p = scalar_grid_subdiff(&abs, &[0.0], &grid).unwrap();
        assert!(p.contains(&[1.0], 1e-9));
        assert!(p.contains(&[-1.0], 1e-9));
        assert!(!p.contains(&[1.2], 1e-9));
        let sq = |x: &[f64]| -> Result<f64> { Ok(x[0] * x[0]) };
        let q = scalar_grid_subdiff(&sq, &[0.0], &grid).unwrap();
        // Shrinks to {0} with the grid step.
        assert!(q.contains(&[0.0], 1e-9));
        assert!(!q.contains(&[0.2], 1e-9));
        let affine = |x: &[f64]| -> Result<f64> { Ok(3.0 * x[0] + 1.0) };
        let r = scalar_grid_subdiff(&affine, &[0.0], &grid).unwrap();
        assert!(r.contains(&[3.0], 1e-9));
        assert!(!r.contains(&[3.1], 1e-6));
    }

    #[test]
    fn grid_subdiff_shrinks_under_refinement() {
        let abs = |x: &[f64]| -> Result<f64> { Ok(x[0].abs()) };
        let coarse =
            scalar_grid_subdiff(&abs, &[0.0], &maps::grid_points(&[(-1.0, 1.0)], 11)).unwrap();
        let fine =
            scalar_grid_subdiff(&abs, &[0.0], &maps::grid_points(&[(-1.0, 1.0)], 81)).unwrap();
        assert!(fine.subset_of(&coarse, 1e-9));
    }

    #[test]
    fn sum_rule_feasible_and_infeasible_targets() {
        let k = halfline();
        let f1 = square_map(k.clone());
        let f2 = abs_map(vec![1.0], k);
        let s = SamplingSchedule::default();
        let grid = maps::grid_points(&[(-1.0, 1.0)], 41);
        let t_ok = LinOp::new(1, 1, vec![0.5]).unwrap();
        let rep = sum_rule_check(&f1, &f2, &[0.0], &t_ok, None, &s, &grid).unwrap();
        assert!(rep.scalarized_decomposition.iter().all(|(_, ok)| *ok));
        let t0 = LinOp::zero(1, 1);
        let t1 = LinOp::zero(1, 1);
        let rep0 = sum_rule_check(&f1, &f2, &[0.0], &t0, Some((&t1, &t1)), &s, &grid).unwrap();
        assert_eq!(rep0.trivial_inclusion, Some(true));
        // T = 2 is not even a subgradient of the sum at 0.
        let t_bad = LinOp::new(1, 1, vec![2.0]).unwrap();
        assert!(matches!(
            sum_rule_check(&f1, &f2, &[0.0], &t_bad, None, &s, &grid),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn radstrom_trivial_and_failing_cases() {
        let k = quadrant();
        let a = ConicPolytope::singleton(vec![1.0, 1.0]);
        let b = ConicPolytope::singleton(vec![0.0, 0.0]);
        let c = ConicPolytope::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![], false)
            .unwrap();
        let r = radstrom_check(&a, &b, &c, &k, 1e-8).unwrap();
        assert!(r.hypothesis && r.conclusion);

        // Conclusion fails, so the hypothesis must fail too.
        let a2 = ConicPolytope::singleton(vec![0.0, 0.0]);
        let b2 =
            ConicPolytope::new(2, vec![vec![1.0, 0.0], vec![-1.0, 1.0]], vec![], false).unwrap();
        let r2 = radstrom_check(&a2, &b2, &c, &k, 1e-8).unwrap();
        assert!(!r2.conclusion);
        assert!(!r2.hypothesis);
    }

    #[test]
    fn radstrom_rejects_bad_cancellation_set() {
        let k = quadrant();
        let a = ConicPolytope::singleton(vec![0.0, 0.0]);
        let c = ConicPolytope::cone_at(vec![0.0, 0.0], vec![vec![-1.0, 0.0]]).unwrap();
        assert!(matches!(
            radstrom_check(&a, &a, &c, &k, 1e-8),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn limiting_certificates_for_abs() {
        let f = abs_map(vec![1.0], halfline());
        let s = SamplingSchedule::default();
        let right = LimitWitness {
            sequence: (1..=8)
                .map(|n| (vec![0.25f64.powi(n)], LinOp::new(1, 1, vec![1.0]).unwrap()))
                .collect(),
            target_x: vec![0.0],
            target_t: LinOp::new(1, 1, vec![1.0]).unwrap(),
        };
        assert!(limiting_member_verify(&f, &right, &s).unwrap().is_accepted());
        let left = LimitWitness {
            sequence: (1..=8)
                .map(|n| (vec![-(0.25f64.powi(n))], LinOp::new(1, 1, vec![-1.0]).unwrap()))
                .collect(),
            target_x: vec![0.0],
            target_t: LinOp::new(1, 1, vec![-1.0]).unwrap(),
        };
        assert!(limiting_member_verify(&f, &left, &s).unwrap().is_accepted());
        let wrong_target = LimitWitness {
            target_t: LinOp::zero(1, 1),
            ..right.clone()
        };
        let v = limiting_member_verify(&f, &wrong_target, &s).unwrap();
        assert!(v.is_rejected(), "operator convergence fails: {:?}", v.status);
    }

    #[test]
    fn limiting_rejects_non_convergent_sequence() {
        let f = abs_map(vec![1.0], halfline());
        let s = SamplingSchedule::default();
        let bad = LimitWitness {
            sequence: (1..=6)
                .map(|_| (vec![0.5], LinOp::new(1, 1, vec![1.0]).unwrap()))
                .collect(),
            target_x: vec![0.0],
            target_t: LinOp::new(1, 1, vec![1.0]).unwrap(),
        };
        assert!(matches!(
            limiting_member_verify(&f, &bad, &s),
            Err(Error::NonConvergentWitness)
        ));
    }

    #[test]
    fn frechet_members_pass_as_constant_limit_certificates() {
        let f = square_map(halfline());
        let s = SamplingSchedule::default();
        let t = LinOp::zero(1, 1);
        assert!(frechet_member(&f, &[0.0], &t, &s).unwrap().is_accepted());
        let w = LimitWitness {
            sequence: (0..5).map(|_| (vec![0.0], t.clone())).collect(),
            target_x: vec![0.0],
            target_t: t,
        };
        assert!(limiting_member_verify(&f, &w, &s).unwrap().is_accepted());
    }

    #[test]
    fn outer_map_and_dual_bound() {
        let k = quadrant();
        let e = Direction::in_cone(vec![1.0, 0.0], &k).unwrap();
        let t = phi_e_subgradient_map(&[1.0], &e);
        assert_eq!(t.data, vec![1.0, 0.0]);
        assert!(norm_e_dual_bound_check(&t, &e, &k, 1e-6));
        let too_big = t.scale(2.0);
        assert!(!norm_e_dual_bound_check(&too_big, &e, &k, 1e-6));
        assert!(norm_e_dual_bound_check(&LinOp::zero(2, 1), &e, &k, 1e-6));
    }

    #[test]
    fn norm_e_frechet_accepts_unit_ball_covectors() {
        let k = quadrant();
        let e = Direction::in_cone(vec![1.0, 1.0], &k).unwrap();
        let f = abs_map(e.vector.clone(), k);
        let s = SamplingSchedule::default();
        for xs in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let t = phi_e_subgradient_map(&[xs], &e);
            assert!(
                frechet_member(&f, &[0.0], &t, &s).unwrap().is_accepted(),
                "x* = {xs}"
            );
        }
    }

    #[test]
    fn difference_rule_on_square_minus_abs() {
        // F(x) = {x^2 e}, phi = |.|, x_bar = 1 (smooth point): the conclusion
        // says T + (y e)^-1 (y t) e = 1 + 1 = 2 is a subgradient of F at 1.
        let k = halfline();
        let e = Direction::in_cone(vec![1.0], &k).unwrap();
        let f = square_map(k);
        let s = SamplingSchedule::default();
        let t_diff = LinOp::new(1, 1, vec![1.0]).unwrap();
        let t_phi = LinOp::new(1, 1, vec![1.0]).unwrap();
        assert_eq!(
            difference_rule_check(&f, &e, &[1.0], &t_diff, &t_phi, &s).unwrap(),
            Status::Accepted
        );
        // A wrong phi-subgradient shifts the candidate off the tangent.
        let t_bad = LinOp::new(1, 1, vec![5.0]).unwrap();
        assert_eq!(
            difference_rule_check(&f, &e, &[1.0], &t_diff, &t_bad, &s).unwrap(),
            Status::Rejected
        );
    }
}
