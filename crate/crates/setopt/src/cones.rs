//! Ordering-cone algebra: dual generator enumeration, directional dual
//! filtering, interior tests, and the scalarized-inclusion checker.
//!
//! Linear statements quantified over all nonzero functionals of the dual cone
//! reduce to its finite generator set, which is exact for polyhedral cones;
//! the concave minimum-domination condition of the inclusion scalarization is
//! instead decided exactly by an LP separation certificate. Duals are
//! enumerated automatically up to dimension 3; above that the caller must
//! supply them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, ConicPolytope, Point};
use crate::kernel::{lp, DIST_TOL, LP_TOL};
use crate::linalg;

/// Margin used for strict (interior) dual inequalities.
pub const INTERIOR_MARGIN: f64 = 1e-7;

/// A linear functional `y*` on the image space, stored by coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarFunctional {
    pub weights: Vec<f64>,
    pub norm: f64,
}

impl ScalarFunctional {
    pub fn new(weights: Vec<f64>) -> Self {
        let norm = linalg::norm2(&weights);
        ScalarFunctional { weights, norm }
    }

    pub fn unit(weights: &[f64]) -> Option<Self> {
        linalg::normalized(weights).map(ScalarFunctional::new)
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        linalg::dot(&self.weights, p)
    }
}

/// The distinguished direction `e` taken from the ordering cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub vector: Point,
}

impl Direction {
    /// Validates `e` lies in the cone and is nonzero.
    pub fn in_cone(vector: Point, k: &PolyCone) -> Result<Self> {
        if vector.len() != k.dim {
            return Err(Error::DimensionMismatch {
                context: "Direction",
                expected: k.dim,
                got: vector.len(),
            });
        }
        if linalg::norm2(&vector) <= 1e-14 {
            return Err(Error::PreconditionFailed(
                "direction e must be nonzero".into(),
            ));
        }
        if !geometry::ray_in_cone(&vector, &k.generators, geometry::RAY_TOL) {
            return Err(Error::PreconditionFailed(
                "direction e must belong to the ordering cone".into(),
            ));
        }
        Ok(Direction { vector })
    }
}

/// A pointed closed convex cone given by generators, together with generators
/// of its dual cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCone {
    pub dim: usize,
    pub generators: Vec<Point>,
    pub dual_generators: Vec<Point>,
}

impl PolyCone {
    /// Build a cone, enumerating dual generators (dimension <= 3 only).
    pub fn new(dim: usize, generators: Vec<Point>) -> Result<Self> {
        let generators = validate_generators(dim, generators)?;
        check_pointed(dim, &generators)?;
        let dual_generators = enumerate_duals(dim, &generators)?;
        Ok(PolyCone {
            dim,
            generators,
            dual_generators,
        })
    }

    /// Build a cone with user-supplied dual generators (any dimension).
    pub fn with_dual_generators(
        dim: usize,
        generators: Vec<Point>,
        duals: Vec<Point>,
    ) -> Result<Self> {
        let generators = validate_generators(dim, generators)?;
        check_pointed(dim, &generators)?;
        let mut dual_generators = Vec::new();
        for y in duals {
            if y.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "dual generator",
                    expected: dim,
                    got: y.len(),
                });
            }
            let yn = linalg::normalized(&y).ok_or(Error::InvalidDualGenerator)?;
            if generators.iter().any(|g| linalg::dot(&yn, g) < -LP_TOL) {
                return Err(Error::InvalidDualGenerator);
            }
            dual_generators.push(yn);
        }
        geometry::dedup_points(&mut dual_generators, 1e-10);
        Ok(PolyCone {
            dim,
            generators,
            dual_generators,
        })
    }

    pub fn duals(&self) -> Vec<ScalarFunctional> {
        self.dual_generators
            .iter()
            .map(|y| ScalarFunctional::new(y.clone()))
            .collect()
    }

    /// The cone as a set rooted at the origin.
    pub fn as_set(&self) -> ConicPolytope {
        ConicPolytope {
            dim: self.dim,
            vertices: vec![vec![0.0; self.dim]],
            rays: self.generators.clone(),
            hulled: false,
        }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        geometry::ray_in_cone(p, &self.generators, tol)
    }

    pub fn is_full_dimensional(&self) -> bool {
        linalg::rank(&self.generators, 1e-10) == self.dim
    }
}

fn validate_generators(dim: usize, generators: Vec<Point>) -> Result<Vec<Point>> {
    if generators.is_empty() {
        return Err(Error::PreconditionFailed("cone needs generators".into()));
    }
    let mut kept = Vec::new();
    for g in generators {
        if g.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "cone generator",
                expected: dim,
                got: g.len(),
            });
        }
        if !linalg::is_finite(&g) {
            return Err(Error::NonFinite("cone generator"));
        }
        if linalg::norm2(&g) > 1e-14 {
            kept.push(g);
        }
    }
    if kept.is_empty() {
        return Err(Error::PreconditionFailed(
            "cone generators are all zero".into(),
        ));
    }
    Ok(kept)
}

/// Pointedness: the only `mu >= 0` with `G mu = 0, sum mu = 1` is none.
fn check_pointed(dim: usize, generators: &[Point]) -> Result<()> {
    let n = generators.len();
    let mut lp = lp::Lp::feasibility(n);
    for i in 0..dim {
        let row = generators.iter().map(|g| g[i]).collect();
        lp.push_eq(row, 0.0);
    }
    lp.push_eq(vec![1.0; n], 1.0);
    if lp::feasible(&lp).is_some() {
        return Err(Error::NonPointedCone);
    }
    Ok(())
}

/// Dual cone generators of `{y : g.y >= 0 for all g}` by double description:
/// start from the generators of the whole space, slice by one halfspace at a
/// time, prune redundant rays by LP at the end. Adequate for dimension <= 3.
fn enumerate_duals(dim: usize, generators: &[Point]) -> Result<Vec<Point>> {
    if dim > 3 {
        return Err(Error::DualEnumerationUnsupported { dim });
    }
    let mut rays: Vec<Point> = Vec::new();
    for i in 0..dim {
        for sgn in [1.0, -1.0] {
            let mut v = vec![0.0; dim];
            v[i] = sgn;
            rays.push(v);
        }
    }
    for g in generators {
        let mut pos: Vec<Point> = Vec::new();
        let mut neg: Vec<Point> = Vec::new();
        let mut zero: Vec<Point> = Vec::new();
        for r in rays {
            let s = linalg::dot(g, &r);
            if s > 1e-10 {
                pos.push(r);
            } else if s < -1e-10 {
                neg.push(r);
            } else {
                zero.push(r);
            }
        }
        let mut next = Vec::new();
        for p in &pos {
            for n in &neg {
                // Combination with g.w = 0.
                let gp = linalg::dot(g, p);
                let gn = linalg::dot(g, n);
                let w = linalg::sub(&linalg::scale(gp, n), &linalg::scale(gn, p));
                if let Some(wn) = linalg::normalized(&w) {
                    next.push(wn);
                }
            }
        }
        next.extend(pos);
        next.extend(zero);
        geometry::dedup_points(&mut next, 1e-10);
        rays = next;
    }
    // Normalize and prune rays that are conic combinations of the others.
    let mut rays: Vec<Point> = rays
        .into_iter()
        .filter_map(|r| linalg::normalized(&r))
        .collect();
    geometry::dedup_points(&mut rays, 1e-10);
    let mut kept: Vec<Point> = Vec::new();
    for i in 0..rays.len() {
        let others: Vec<Point> = rays
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if !geometry::ray_in_cone(&rays[i], &others, 1e-9) {
            kept.push(rays[i].clone());
        }
    }
    if kept.is_empty() && !rays.is_empty() {
        // All rays mutually dependent (e.g. a halfline's dual in dim 1).
        kept.push(rays[0].clone());
    }
    kept.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(kept)
}

/// Public entry point mirroring the cone's cached duals.
pub fn dual_generators(k: &PolyCone) -> Vec<ScalarFunctional> {
    k.duals()
}

/// Dual generators not vanishing on `e`.
pub fn k_e_plus(k: &PolyCone, e: &Direction, tol: f64) -> Result<Vec<ScalarFunctional>> {
    let kept: Vec<ScalarFunctional> = k
        .duals()
        .into_iter()
        .filter(|y| y.eval(&e.vector).abs() > tol)
        .collect();
    if kept.is_empty() {
        return Err(Error::Inconsistency(
            "no dual generator pairs nontrivially with e; \
             e is likely outside the cone or the duals are wrong"
                .into(),
        ));
    }
    Ok(kept)
}

/// Interior membership for full-dimensional cones: all unit duals keep a
/// uniform positive margin.
pub fn interior_member(p: &[f64], k: &PolyCone, tol: f64) -> Result<bool> {
    if !k.is_full_dimensional() {
        return Err(Error::InteriorEmpty);
    }
    Ok(k.dual_generators
        .iter()
        .all(|y| linalg::dot(y, p) >= tol * linalg::norm2(y)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    /// `A` contained in `B + K` (interior of `K` when strict).
    pub direct: bool,
    /// For every `y*` in the dual cone: `min y*(A) >= min y*(B)` (strict
    /// variant: `>` over the dual generators).
    pub scalarized: bool,
}

/// Scalarized minimum of `y*` over a cloud+cone set; `NegInf` when a ray of
/// the set points against the functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarMin {
    Finite(f64),
    NegInf,
}

pub fn scalar_min(y: &ScalarFunctional, s: &ConicPolytope, tol: f64) -> ScalarMin {
    if s.rays.iter().any(|r| {
        linalg::normalized(r)
            .map(|rn| y.eval(&rn) < -tol)
            .unwrap_or(false)
    }) {
        return ScalarMin::NegInf;
    }
    let m = s
        .vertices
        .iter()
        .map(|v| y.eval(v))
        .fold(f64::INFINITY, f64::min);
    ScalarMin::Finite(m)
}

/// Containment `A ⊂ B + K` (direct) side by side with its scalarization.
pub fn scalarized_inclusion_check(
    a: &ConicPolytope,
    b: &ConicPolytope,
    k: &PolyCone,
    strict: bool,
) -> Result<InclusionReport> {
    let direct = if strict {
        direct_inclusion_strict(a, b, k)?
    } else {
        direct_inclusion(a, b, k, DIST_TOL)?
    };
    let scalarized = if strict {
        let mut ok = true;
        for y in k.duals() {
            let ma = scalar_min(&y, a, LP_TOL);
            let mb = scalar_min(&y, b, LP_TOL);
            let pair_ok = match (ma, mb) {
                (_, ScalarMin::NegInf) => ma != ScalarMin::NegInf,
                (ScalarMin::NegInf, ScalarMin::Finite(_)) => false,
                (ScalarMin::Finite(va), ScalarMin::Finite(vb)) => va >= vb + INTERIOR_MARGIN,
            };
            if !pair_ok {
                ok = false;
                break;
            }
        }
        ok
    } else {
        scalarized_min_dominates(a, b, k)?
    };
    Ok(InclusionReport { direct, scalarized })
}

/// Exact quantifier over the whole dual cone: true unless some `y* ∈ K⁺`
/// puts `min y*(A)` strictly below `min y*(B)`. The failure certificate is a
/// separating functional found by LP: `y* ∈ K⁺`, nonnegative on the rays of
/// `B` (so the right minimum is finite), with either `y*(v_B − a) ≥ 1` for
/// every vertex of `B` and some vertex `a` of `A`, or `y*(r_A) ≤ −1` for
/// some ray of `A`. Generator-only scalarization would be strictly weaker
/// here, because the minimum is concave rather than linear in `y*`.
fn scalarized_min_dominates(a: &ConicPolytope, b: &ConicPolytope, k: &PolyCone) -> Result<bool> {
    let dim = k.dim;
    let n = 2 * dim;
    // y is free; simplex variables are nonnegative, so y = y⁺ − y⁻.
    let row_for = |v: &[f64], sign: f64| -> Vec<f64> {
        let mut row = Vec::with_capacity(n);
        row.extend(v.iter().map(|c| sign * c));
        row.extend(v.iter().map(|c| -sign * c));
        row
    };
    let base = |lp: &mut lp::Lp| {
        for g in &k.generators {
            lp.push_le(row_for(g, -1.0), 0.0);
        }
        for r in &b.rays {
            lp.push_le(row_for(r, -1.0), 0.0);
        }
    };
    for va in &a.vertices {
        let mut probe = lp::Lp::feasibility(n);
        base(&mut probe);
        for vb in &b.vertices {
            let diff = linalg::sub(vb, va);
            probe.push_le(row_for(&diff, -1.0), -1.0);
        }
        if lp::feasible(&probe).is_some() {
            return Ok(false);
        }
    }
    for ra in &a.rays {
        let mut probe = lp::Lp::feasibility(n);
        base(&mut probe);
        probe.push_le(row_for(ra, 1.0), -1.0);
        if lp::feasible(&probe).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `A ⊂ B + K`: every ray of `A` in the sum's recession cone and every vertex
/// of `A` a member of `B + K`. Exact for both hulled and non-hulled `A`,
/// because all cells of `B + K` share one recession cone.
fn direct_inclusion(a: &ConicPolytope, b: &ConicPolytope, k: &PolyCone, tol: f64) -> Result<bool> {
    let sum_rays: Vec<Point> = b
        .rays
        .iter()
        .chain(k.generators.iter())
        .cloned()
        .collect();
    if !a.recession_within(&sum_rays) {
        return Ok(false);
    }
    let target = geometry::minkowski(b, &k.as_set())?;
    for v in &a.vertices {
        if !target.member(v, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `A ⊂ B + int K`: per vertex of `A`, maximize the worst dual margin over
/// the representation of a matching point of `B`; accept at margin
/// `INTERIOR_MARGIN`.
fn direct_inclusion_strict(a: &ConicPolytope, b: &ConicPolytope, k: &PolyCone) -> Result<bool> {
    if !k.is_full_dimensional() {
        return Err(Error::InteriorEmpty);
    }
    let sum_rays: Vec<Point> = b
        .rays
        .iter()
        .chain(k.generators.iter())
        .cloned()
        .collect();
    if !a.recession_within(&sum_rays) {
        return Ok(false);
    }
    for va in &a.vertices {
        let mut ok = false;
        if b.hulled {
            ok = strict_margin_lp(va, &b.vertices, &b.rays, k)? >= INTERIOR_MARGIN;
        } else {
            for vb in &b.vertices {
                if strict_margin_lp(va, std::slice::from_ref(vb), &b.rays, k)? >= INTERIOR_MARGIN {
                    ok = true;
                    break;
                }
            }
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Max over `b = V lam + R mu` (simplex lam, mu >= 0) of the minimum unit-dual
/// value of `a - b` over `cone(K)`; positive iff `a` is in `b + int K` for
/// some admissible `b`.
fn strict_margin_lp(
    a: &[f64],
    vertices: &[Point],
    rays: &[Point],
    k: &PolyCone,
) -> Result<f64> {
    let nv = vertices.len();
    let nr = rays.len();
    // Variables: lam (nv), mu (nr), t (shifted by +BIG to stay nonnegative).
    const BIG: f64 = 1e6;
    let n = nv + nr + 1;
    let mut obj = vec![0.0; n];
    obj[n - 1] = -1.0; // maximize t
    let mut lp = lp::Lp::minimize(n, obj);
    for y in &k.dual_generators {
        let yn = linalg::normalized(y).ok_or(Error::InvalidDualGenerator)?;
        // y.(a - V lam - R mu) >= t - BIG  =>  y.V lam + y.R mu + t <= y.a + BIG
        let mut row = vec![0.0; n];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = linalg::dot(&yn, v);
        }
        for (j, r) in rays.iter().enumerate() {
            row[nv + j] = linalg::dot(&yn, r);
        }
        row[n - 1] = 1.0;
        lp.push_le(row, linalg::dot(&yn, a) + BIG);
    }
    let mut simplex = vec![0.0; n];
    for s in simplex.iter_mut().take(nv) {
        *s = 1.0;
    }
    lp.push_eq(simplex, 1.0);
    match lp::solve(&lp) {
        lp::LpOutcome::Optimal { x, .. } => Ok(x[n - 1] - BIG),
        lp::LpOutcome::Unbounded => Ok(f64::INFINITY),
        lp::LpOutcome::Infeasible => Err(Error::Inconsistency(
            "strict-margin LP infeasible despite simplex row".into(),
        )),
    }
}
