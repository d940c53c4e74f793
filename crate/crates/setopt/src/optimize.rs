//! Set-order minimality: the lower set-less relation, l-minimum and
//! ideal-minimum checkers, the robustness margin of the comparison lemma,
//! exact distance penalization, a grid solver, and the sharp-minimality
//! necessary-condition report.

use serde::{Deserialize, Serialize};

use crate::cones::{self, PolyCone};
use crate::dsl::{MapExpr, ScalarExpr};
use crate::error::{Error, Result};
use crate::geometry::{self, ConicPolytope, Point};
use crate::kernel::nnls;
use crate::linalg;
use crate::maps::{
    self, grid_points, scalarize, SamplingSchedule, ScalarValue, SetValuedMap, Status, Verdict,
};
use crate::subdiff::{minkowski_pair_feasible, scalar_grid_subdiff, ScalarSubdiffPoly};

/// Feasible region: a finite union of cloud+cone pieces in the argument space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub pieces: Vec<ConicPolytope>,
}

impl ConstraintSet {
    pub fn new(pieces: Vec<ConicPolytope>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::PreconditionFailed(
                "constraint set needs at least one piece".into(),
            ));
        }
        Ok(ConstraintSet { pieces })
    }

    /// The whole space, as far as a box scan is concerned.
    pub fn whole_box(bounds: &[(f64, f64)]) -> Self {
        let dim = bounds.len();
        let lo: Point = bounds.iter().map(|b| b.0).collect();
        let hi: Point = bounds.iter().map(|b| b.1).collect();
        let mut vertices = vec![Vec::new()];
        for i in 0..dim {
            let mut next = Vec::new();
            for v in &vertices {
                for val in [lo[i], hi[i]] {
                    let mut w = v.clone();
                    w.push(val);
                    next.push(w);
                }
            }
            vertices = next;
        }
        ConstraintSet {
            pieces: vec![ConicPolytope::new(dim, vertices, Vec::new(), true).unwrap()],
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        for piece in &self.pieces {
            if piece.member(x, tol)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        let mut best = f64::INFINITY;
        for piece in &self.pieces {
            best = best.min(piece.distance(x)?);
        }
        Ok(best)
    }

    /// Box-grid points lying inside the set.
    pub fn grid(&self, bounds: &[(f64, f64)], per_axis: usize) -> Result<Vec<Point>> {
        let mut out = Vec::new();
        for x in grid_points(bounds, per_axis) {
            if self.contains(&x, 1e-9)? {
                out.push(x);
            }
        }
        Ok(out)
    }

    pub fn as_scalar_distance(&self) -> ScalarExpr {
        ScalarExpr::DistToSet {
            pieces: self.pieces.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenalizationConfig {
    /// Penalty modulus `ℓ > 0`.
    pub ell: f64,
    /// Sharp-minimum modulus `μ ≥ 0`.
    pub mu: f64,
    pub e: cones::Direction,
    /// Locality radius.
    pub radius: f64,
}

impl PenalizationConfig {
    pub fn validate(&self, k: &PolyCone) -> Result<()> {
        if !(self.ell > 0.0) || !(self.radius > 0.0) || self.mu < 0.0 {
            return Err(Error::PreconditionFailed(
                "penalization needs ell > 0, radius > 0, mu >= 0".into(),
            ));
        }
        cones::Direction::in_cone(self.e.vector.clone(), k)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalityKind {
    LMin,
    IdealMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub kind: MinimalityKind,
    pub status: Status,
    pub witnesses: Vec<Point>,
    /// For ideal minima: whether `F(x) ⊂ F(x̄)+K` held at every scanned point.
    pub consequence_inclusion: Option<bool>,
}

impl MinimalityReport {
    pub fn is_accepted(&self) -> bool {
        self.status == Status::Accepted
    }
}

/// Lower set-less relation: `A ⪯ B` iff `B ⊂ A + K`.
pub fn l_leq(a: &ConicPolytope, b: &ConicPolytope, k: &PolyCone, tol: f64) -> Result<bool> {
    let target = geometry::minkowski(a, &k.as_set())?;
    Ok(geometry::excess(b, &target)?.value <= tol)
}

/// l-minimality of `x_bar` on `M` within radius `eps`: whenever a nearby
/// feasible value dominates `F(x_bar)`, domination must go both ways.
pub fn check_l_min(
    f: &SetValuedMap,
    m: &ConstraintSet,
    x_bar: &[f64],
    eps: f64,
    per_axis: usize,
    schedule: &SamplingSchedule,
) -> Result<MinimalityReport> {
    let local = local_grid(m, x_bar, eps, per_axis, schedule, f.dim_x)?;
    let base = f.eval(x_bar)?;
    let tol = schedule.accept_tol;
    let mut witnesses = Vec::new();
    for x in &local {
        let val = f.eval(x)?;
        if l_leq(&val, &base, &f.cone, tol)? && !l_leq(&base, &val, &f.cone, tol)? {
            witnesses.push(x.clone());
        }
    }
    Ok(MinimalityReport {
        kind: MinimalityKind::LMin,
        status: if witnesses.is_empty() {
            Status::Accepted
        } else {
            Status::Rejected
        },
        witnesses,
        consequence_inclusion: None,
    })
}

/// Ideal minimality of `x_bar` on `M` within radius `eps`: at every nearby
/// feasible `x`, some point `a` of `F(x_bar)` satisfies `F(x) ⊂ a + K`.
/// The existential ranges over vertices of `F(x_bar)`, which is exact when
/// its rays stay inside `K`; otherwise the scan is inconclusive.
pub fn check_ideal_min(
    f: &SetValuedMap,
    m: &ConstraintSet,
    x_bar: &[f64],
    eps: f64,
    per_axis: usize,
    schedule: &SamplingSchedule,
) -> Result<MinimalityReport> {
    let base = f.eval(x_bar)?;
    let tol = schedule.accept_tol;
    if !base.recession_within(&f.cone.generators) {
        return Ok(MinimalityReport {
            kind: MinimalityKind::IdealMin,
            status: Status::Inconclusive,
            witnesses: Vec::new(),
            consequence_inclusion: None,
        });
    }
    let local = local_grid(m, x_bar, eps, per_axis, schedule, f.dim_x)?;
    let k_set = f.cone.as_set();
    let base_plus_k = geometry::minkowski(&base, &k_set)?;
    let mut witnesses = Vec::new();
    let mut consequence = true;
    for x in &local {
        let val = f.eval(x)?;
        let mut ok = false;
        for a in &base.vertices {
            let cell = ConicPolytope::cone_at(a.clone(), f.cone.generators.clone())?;
            if geometry::excess(&val, &cell)?.value <= tol {
                ok = true;
                break;
            }
        }
        if !ok {
            witnesses.push(x.clone());
        }
        if consequence && !(geometry::excess(&val, &base_plus_k)?.value <= tol) {
            consequence = false;
        }
    }
    Ok(MinimalityReport {
        kind: MinimalityKind::IdealMin,
        status: if witnesses.is_empty() {
            Status::Accepted
        } else {
            Status::Rejected
        },
        witnesses,
        consequence_inclusion: Some(consequence),
    })
}

fn local_grid(
    m: &ConstraintSet,
    x_bar: &[f64],
    eps: f64,
    per_axis: usize,
    schedule: &SamplingSchedule,
    dim_x: usize,
) -> Result<Vec<Point>> {
    if !m.contains(x_bar, 1e-7)? {
        return Err(Error::PreconditionFailed(
            "base point is not feasible".into(),
        ));
    }
    let bounds = schedule.box_for(dim_x);
    let mut local: Vec<Point> = Vec::new();
    for x in m.grid(&bounds, per_axis)? {
        let d = linalg::dist2(&x, x_bar);
        if d <= eps && d > 1e-12 {
            local.push(x);
        }
    }
    if local.is_empty() {
        return Err(Error::EmptyLocalGrid);
    }
    Ok(local)
}

/// Constructive margin for `A ⊂ D + Y∖−K`: the smallest over vertices of `A`
/// of the largest distance `d(a − d, −K)` over vertices of `D`. Enlarging `A`
/// by any radius below the margin preserves the inclusion.
pub fn robustness_margin(a: &ConicPolytope, d: &ConicPolytope, k: &PolyCone) -> Result<f64> {
    let neg_gens: Vec<Point> = k.generators.iter().map(|g| linalg::scale(-1.0, g)).collect();
    let mut margin = f64::INFINITY;
    for va in &a.vertices {
        let mut best = 0.0_f64;
        for vd in &d.vertices {
            let dist = nnls::distance_to_cone(&neg_gens, &linalg::sub(va, vd));
            best = best.max(dist);
        }
        if best <= 1e-10 {
            return Err(Error::PreconditionFailed(format!(
                "hypothesis fails: vertex {va:?} lies in D + (-K)"
            )));
        }
        margin = margin.min(best);
    }
    Ok(margin)
}

/// The penalized map `G = F + ℓ d_M(·) e`.
pub fn penalize(f: &SetValuedMap, m: &ConstraintSet, cfg: &PenalizationConfig) -> SetValuedMap {
    let penalty = MapExpr::ScalarDir {
        scalar: Box::new(ScalarExpr::ScaleBy {
            factor: cfg.ell,
            child: Box::new(m.as_scalar_distance()),
        }),
        e: cfg.e.vector.clone(),
    };
    let mut out = f.clone();
    out.expr = MapExpr::Sum {
        children: vec![f.expr.clone(), penalty],
    };
    out
}

/// The sharp-shifted map `F − μ‖· − x̄‖ e`.
pub fn sharp_shift(f: &SetValuedMap, x_bar: &[f64], mu: f64, e: &cones::Direction) -> SetValuedMap {
    let shift = MapExpr::ScalarDir {
        scalar: Box::new(ScalarExpr::ScaleBy {
            factor: -mu,
            child: Box::new(ScalarExpr::Norm {
                center: x_bar.to_vec(),
            }),
        }),
        e: e.vector.clone(),
    };
    let mut out = f.clone();
    out.expr = MapExpr::Sum {
        children: vec![f.expr.clone(), shift],
    };
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenalizationReport {
    pub constrained_ideal: MinimalityReport,
    pub lipschitz: Verdict,
    pub unconstrained_ideal: MinimalityReport,
}

/// The three penalization clauses: (a) ideal minimality on `M`, (b) the
/// generalized Lipschitz condition `F(u) + ℓ‖u−v‖e ⊂ F(v)+K` across the
/// boundary of `M`, (c) ideal minimality of the penalized map on the box.
pub fn verify_penalization(
    f: &SetValuedMap,
    m: &ConstraintSet,
    x_bar: &[f64],
    cfg: &PenalizationConfig,
    schedule: &SamplingSchedule,
    per_axis: usize,
) -> Result<PenalizationReport> {
    cfg.validate(&f.cone)?;
    let constrained_ideal = check_ideal_min(f, m, x_bar, cfg.radius, per_axis, schedule)?;

    // (b): sampled pairs u outside M, v inside M, both near x_bar.
    let bounds = schedule.box_for(f.dim_x);
    let k_set = f.cone.as_set();
    let mut worst = 0.0;
    let mut witness = None;
    let inside: Vec<Point> = m
        .grid(&bounds, per_axis)?
        .into_iter()
        .filter(|v| linalg::dist2(v, x_bar) <= cfg.radius)
        .collect();
    let outside: Vec<Point> = maps::box_samples(&bounds, 200, schedule.seed)
        .into_iter()
        .map(|p| {
            // Pull samples into the locality ball around the base point.
            let d = linalg::sub(&p, x_bar);
            linalg::add(x_bar, &linalg::scale(0.9 * cfg.radius / bound_norm(&bounds), &d))
        })
        .filter(|u| !m.contains(u, 1e-9).unwrap_or(true))
        .take(60)
        .collect();
    let vacuous = outside.is_empty();
    for u in &outside {
        let fu = f.eval(u)?;
        for v in &inside {
            let step = ConicPolytope::singleton(linalg::scale(
                cfg.ell * linalg::dist2(u, v),
                &cfg.e.vector,
            ));
            let left = geometry::minkowski(&fu, &step)?;
            let right = geometry::minkowski(&f.eval(v)?, &k_set)?;
            let exc = geometry::excess(&left, &right)?;
            let val = if exc.value.is_infinite() {
                1.0
            } else {
                exc.value / linalg::dist2(u, v)
            };
            if val > worst {
                worst = val;
                witness = Some(u.clone());
            }
        }
    }
    let lipschitz = Verdict {
        status: if vacuous || worst <= schedule.accept_tol {
            Status::Accepted
        } else if worst >= schedule.reject_tol {
            Status::Rejected
        } else {
            Status::Inconclusive
        },
        curve: vec![(cfg.radius, worst)],
        witness,
    };

    let g = penalize(f, m, cfg);
    let whole = ConstraintSet::whole_box(&bounds);
    let unconstrained_ideal = check_ideal_min(&g, &whole, x_bar, cfg.radius, per_axis, schedule)?;
    Ok(PenalizationReport {
        constrained_ideal,
        lipschitz,
        unconstrained_ideal,
    })
}

fn bound_norm(bounds: &[(f64, f64)]) -> f64 {
    bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / 2.0)
        .fold(0.0, f64::max)
        .max(1e-12)
}

/// Scan the feasible grid for ideal minima; output ordered by scalarized
/// merit, then lexicographically.
pub fn solve_ideal(
    f: &SetValuedMap,
    m: &ConstraintSet,
    schedule: &SamplingSchedule,
    per_axis: usize,
) -> Result<Vec<(Point, MinimalityReport)>> {
    let bounds = schedule.box_for(f.dim_x);
    let grid = m.grid(&bounds, per_axis)?;
    if grid.is_empty() {
        return Err(Error::EmptyLocalGrid);
    }
    let step = bounds
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (per_axis - 1) as f64)
        .fold(0.0, f64::max);
    let eps = 2.5 * step;
    let duals = f.cone.duals();
    let mut found: Vec<(f64, Point, MinimalityReport)> = Vec::new();
    for x in &grid {
        let report = match check_ideal_min(f, m, x, eps, per_axis, schedule) {
            Ok(r) => r,
            Err(Error::EmptyLocalGrid) => continue,
            Err(e) => return Err(e),
        };
        if report.is_accepted() {
            let mut merit = f64::INFINITY;
            for y in &duals {
                match scalarize(f, y, x)? {
                    ScalarValue::Finite(v) => merit = merit.min(v),
                    ScalarValue::NegInf => merit = f64::NEG_INFINITY,
                }
            }
            found.push((merit, x.clone(), report));
        }
    }
    found.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                a.1.iter()
                    .zip(&b.1)
                    .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    Ok(found.into_iter().map(|(_, x, r)| (x, r)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditionEntry {
    pub dual: Vec<f64>,
    pub covector: Vec<f64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    /// The report only applies when the subdifferentials in play are the
    /// convex (grid-checkable) ones; preconditions failing marks it
    /// conditional rather than silently asserting.
    pub conditional: bool,
    pub entries: Vec<NecessaryConditionEntry>,
    pub overall_feasible: bool,
    pub grid_step: f64,
}

fn scaled_poly(p: &ScalarSubdiffPoly, c: f64) -> ScalarSubdiffPoly {
    if c == 0.0 {
        // The singleton {0}.
        let mut halfspaces = Vec::new();
        for i in 0..p.dim {
            let mut n = vec![0.0; p.dim];
            n[i] = 1.0;
            halfspaces.push((n.clone(), 0.0));
            let neg = linalg::scale(-1.0, &n);
            halfspaces.push((neg, 0.0));
        }
        return ScalarSubdiffPoly {
            halfspaces,
            dim: p.dim,
            grid_step: p.grid_step,
        };
    }
    ScalarSubdiffPoly {
        halfspaces: p
            .halfspaces
            .iter()
            .map(|(n, o)| (n.clone(), c * o))
            .collect(),
        dim: p.dim,
        grid_step: p.grid_step,
    }
}

/// Sharp-minimality necessary condition: for each dual generator pairing with
/// `e` and each extreme covector `w` of the unit cross-polytope in the
/// argument space, test the LP feasibility of
/// `μ y*(e) w ∈ S_F ⊕ (ℓ+μ) y*(e) S_d`, where `S_F`, `S_d` are the grid
/// subdifferentials of the scalarized map and of `d_M` at `x_bar`.
pub fn necessary_condition_report(
    f: &SetValuedMap,
    m: &ConstraintSet,
    x_bar: &[f64],
    cfg: &PenalizationConfig,
    schedule: &SamplingSchedule,
    grid: &[Point],
    conditional: bool,
) -> Result<NecessaryConditionReport> {
    schedule.validate()?;
    cfg.validate(&f.cone)?;
    let duals = cones::k_e_plus(&f.cone, &cfg.e, 1e-9)?;
    let mut entries = Vec::new();
    let mut overall = true;
    let mut grid_step = 0.0_f64;
    for y in &duals {
        let ye = y.eval(&cfg.e.vector);
        let gf = |x: &[f64]| -> Result<f64> {
            scalarize(f, y, x)?.finite().ok_or_else(|| {
                Error::PreconditionFailed("scalarization unbounded below".into())
            })
        };
        let gd = |x: &[f64]| -> Result<f64> { m.distance(x) };
        let s_f = scalar_grid_subdiff(&gf, x_bar, grid)?;
        let s_d = scaled_poly(
            &scalar_grid_subdiff(&gd, x_bar, grid)?,
            (cfg.ell + cfg.mu) * ye,
        );
        grid_step = grid_step.max(s_f.grid_step);
        for i in 0..f.dim_x {
            for sgn in [1.0, -1.0] {
                let mut w = vec![0.0; f.dim_x];
                w[i] = sgn;
                let target = linalg::scale(cfg.mu * ye, &w);
                let feasible = minkowski_pair_feasible(&target, &s_f, &s_d);
                overall &= feasible;
                entries.push(NecessaryConditionEntry {
                    dual: y.weights.clone(),
                    covector: w,
                    feasible,
                });
            }
        }
    }
    Ok(NecessaryConditionReport {
        conditional,
        entries,
        overall_feasible: overall,
        grid_step,
    })
}
