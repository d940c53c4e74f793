//! Exact set arithmetic on cloud+cone sets.
//!
//! The universal set representation is `ConicPolytope`: a finite vertex cloud
//! `V` plus recession-cone generators `R`. With `hulled = true` the set is
//! `conv(V) + cone(R)`; otherwise it is `V + cone(R)`, a finite union of
//! translated cones. The non-hulled form is the default for values of
//! set-valued maps, because epigraphical sets are exactly cloud + cone and the
//! vertex reduction of the excess functional is then exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{lp, nnls, DIST_TOL};
use crate::linalg;
use crate::linop::LinOp;

pub type Point = Vec<f64>;

/// Absolute tolerance for vertex deduplication.
pub const DEDUP_TOL: f64 = 1e-12;
/// Tolerance for recession-cone inclusion checks (on normalized rays).
pub const RAY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicPolytope {
    pub dim: usize,
    pub vertices: Vec<Point>,
    pub rays: Vec<Point>,
    pub hulled: bool,
}

/// Result of the excess functional `e(A, B) = sup_{a in A} d(a, B)`.
#[derive(Debug, Clone)]
pub struct ExcessValue {
    /// `f64::INFINITY` when the recession cone of `A` escapes that of `B`.
    pub value: f64,
    /// A vertex of `A` attaining the supremum (absent for infinite excess
    /// detected at a ray).
    pub attaining_vertex: Option<Point>,
}

impl ExcessValue {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

impl ConicPolytope {
    pub fn new(dim: usize, vertices: Vec<Point>, rays: Vec<Point>, hulled: bool) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "ConicPolytope vertex",
                    expected: dim,
                    got: v.len(),
                });
            }
            if !linalg::is_finite(v) {
                return Err(Error::NonFinite("vertex"));
            }
        }
        let mut kept_rays = Vec::new();
        for r in rays {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "ConicPolytope ray",
                    expected: dim,
                    got: r.len(),
                });
            }
            if !linalg::is_finite(&r) {
                return Err(Error::NonFinite("ray"));
            }
            // Zero rays are dropped silently.
            if linalg::norm2(&r) > DEDUP_TOL {
                kept_rays.push(r);
            }
        }
        let mut s = ConicPolytope {
            dim,
            vertices,
            rays: kept_rays,
            hulled,
        };
        s.dedup();
        Ok(s)
    }

    pub fn singleton(p: Point) -> Self {
        let dim = p.len();
        ConicPolytope {
            dim,
            vertices: vec![p],
            rays: Vec::new(),
            hulled: false,
        }
    }

    /// The translated cone `vertex + cone(rays)`.
    pub fn cone_at(vertex: Point, rays: Vec<Point>) -> Result<Self> {
        let dim = vertex.len();
        ConicPolytope::new(dim, vec![vertex], rays, false)
    }

    pub fn with_hull(&self) -> Self {
        let mut s = self.clone();
        s.hulled = true;
        s
    }

    fn dedup(&mut self) {
        dedup_points(&mut self.vertices, DEDUP_TOL);
        dedup_directions(&mut self.rays);
    }

    /// Membership test via LP feasibility on the sup-norm residual.
    pub fn member(&self, p: &[f64], tol: f64) -> Result<bool> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "member point",
                expected: self.dim,
                got: p.len(),
            });
        }
        if self.hulled {
            Ok(min_inf_residual(&self.vertices, &self.rays, p, true) <= tol)
        } else {
            for v in &self.vertices {
                let shifted = linalg::sub(p, v);
                let empty: [Point; 0] = [];
                if min_inf_residual(&empty, &self.rays, &shifted, false) <= tol {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }

    /// Euclidean distance from `p` to the set, via the projection kernel.
    pub fn distance(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "distance point",
                expected: self.dim,
                got: p.len(),
            });
        }
        if self.hulled {
            let (_, _, d) = nnls::project_hulled(&self.vertices, &self.rays, p);
            Ok(d)
        } else {
            let mut best = f64::INFINITY;
            for v in &self.vertices {
                let d = nnls::distance_to_cone(&self.rays, &linalg::sub(p, v));
                best = best.min(d);
            }
            Ok(best)
        }
    }

    /// True when every ray of `self` lies in `cone(dirs)`.
    pub fn recession_within(&self, dirs: &[Point]) -> bool {
        self.rays
            .iter()
            .all(|r| ray_in_cone(r, dirs, RAY_TOL))
    }
}

/// `e(A, B)`: +infinity when `cone(rays A)` is not contained in
/// `cone(rays B)`, otherwise the max of `d(vertex, B)` over the vertices of
/// `A`. The vertex reduction is exact: translating by a recession direction of
/// `B` cannot increase the distance, and for hulled `A` the distance to a
/// convex `B` is convex, so its max over `conv V` is attained at a vertex.
pub fn excess(a: &ConicPolytope, b: &ConicPolytope) -> Result<ExcessValue> {
    check_same_dim(a, b, "excess")?;
    if a.hulled && !b.hulled {
        return Err(Error::UnsupportedShape(
            "excess with hulled A and non-hulled B is unsound; sample explicitly",
        ));
    }
    if !a.recession_within(&b.rays) {
        return Ok(ExcessValue {
            value: f64::INFINITY,
            attaining_vertex: None,
        });
    }
    let mut value = 0.0;
    let mut attaining = None;
    for v in &a.vertices {
        let d = b.distance(v)?;
        if d > value || attaining.is_none() {
            value = d;
            attaining = Some(v.clone());
        }
    }
    Ok(ExcessValue {
        value,
        attaining_vertex: attaining,
    })
}

/// Minkowski sum. Vertices are pairwise sums and rays are unioned; the result
/// is hulled only when both operands are hulled.
pub fn minkowski(a: &ConicPolytope, b: &ConicPolytope) -> Result<ConicPolytope> {
    check_same_dim(a, b, "minkowski")?;
    let mut vertices = Vec::with_capacity(a.vertices.len() * b.vertices.len());
    for va in &a.vertices {
        for vb in &b.vertices {
            vertices.push(linalg::add(va, vb));
        }
    }
    let rays = a.rays.iter().chain(b.rays.iter()).cloned().collect();
    // A single-vertex operand coincides with its hull, so it never breaks
    // convexity of the sum.
    let a_conv = a.hulled || a.vertices.len() == 1;
    let b_conv = b.hulled || b.vertices.len() == 1;
    let hulled = a_conv && b_conv && (a.hulled || b.hulled);
    ConicPolytope::new(a.dim, vertices, rays, hulled)
}

/// Image `T(S) + shift`: vertices and rays map through `T`; the shift applies
/// to vertices only.
pub fn affine_image(t: &LinOp, shift: &[f64], s: &ConicPolytope) -> Result<ConicPolytope> {
    if t.cols != s.dim {
        return Err(Error::DimensionMismatch {
            context: "affine_image operator",
            expected: s.dim,
            got: t.cols,
        });
    }
    if shift.len() != t.rows {
        return Err(Error::DimensionMismatch {
            context: "affine_image shift",
            expected: t.rows,
            got: shift.len(),
        });
    }
    let vertices = s
        .vertices
        .iter()
        .map(|v| linalg::add(&t.apply(v), shift))
        .collect();
    let rays = s.rays.iter().map(|r| t.apply(r)).collect();
    ConicPolytope::new(t.rows, vertices, rays, s.hulled)
}

/// Scale the set by `lambda` (vertices and rays alike; `lambda = 0` collapses
/// to the origin).
pub fn scale_set(lambda: f64, s: &ConicPolytope) -> ConicPolytope {
    if lambda == 0.0 {
        return ConicPolytope {
            dim: s.dim,
            vertices: vec![vec![0.0; s.dim]],
            rays: Vec::new(),
            hulled: s.hulled,
        };
    }
    let mut out = ConicPolytope {
        dim: s.dim,
        vertices: s.vertices.iter().map(|v| linalg::scale(lambda, v)).collect(),
        rays: s.rays.iter().map(|r| linalg::scale(lambda, r)).collect(),
        hulled: s.hulled,
    };
    out.dedup();
    out
}

/// Polyhedral inner approximation of `radius * D_Y`: the cross-polytope
/// `conv{ +- radius e_i }`. Exact in dimension 1; in general the inradius is
/// `radius / sqrt(dim)`, and verdicts based on it are conservative.
pub fn scaled_ball(dim: usize, radius: f64) -> Result<ConicPolytope> {
    if radius < 0.0 {
        return Err(Error::NegativeRadius);
    }
    if radius == 0.0 {
        return ConicPolytope::new(dim, vec![vec![0.0; dim]], Vec::new(), true);
    }
    let mut vertices = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for sgn in [1.0, -1.0] {
            let mut v = vec![0.0; dim];
            v[i] = sgn * radius;
            vertices.push(v);
        }
    }
    ConicPolytope::new(dim, vertices, Vec::new(), true)
}

/// Refined 2-D ball approximation: a regular `k`-gon of circumradius `radius`.
pub fn scaled_ball_refined(dim: usize, radius: f64, k: usize) -> Result<ConicPolytope> {
    if dim != 2 {
        return Err(Error::UnsupportedShape("ball refinement is 2-D only"));
    }
    if radius < 0.0 {
        return Err(Error::NegativeRadius);
    }
    if radius == 0.0 || k < 3 {
        return scaled_ball(dim, radius);
    }
    let vertices = (0..k)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            vec![radius * th.cos(), radius * th.sin()]
        })
        .collect();
    ConicPolytope::new(dim, vertices, Vec::new(), true)
}

/// Excess of `A` into the epsilon-cross-polytope enlargement of `B`, keeping
/// the enlargement hulled per vertex of `B`:
/// `max_{a in V_A} min_{b in V_B} d(a, conv(b +- eps e_i) + cone(rays B))`.
///
/// This is the correct target when `B (+) eps D` must stay a union of hulled
/// translates rather than collapse to a point cloud.
pub fn excess_into_enlargement(
    a: &ConicPolytope,
    b: &ConicPolytope,
    eps: f64,
) -> Result<ExcessValue> {
    check_same_dim(a, b, "excess_into_enlargement")?;
    if !a.recession_within(&b.rays) {
        return Ok(ExcessValue {
            value: f64::INFINITY,
            attaining_vertex: None,
        });
    }
    let ball = scaled_ball(b.dim, eps)?;
    let mut value = 0.0;
    let mut attaining = None;
    for va in &a.vertices {
        let mut best = f64::INFINITY;
        for vb in &b.vertices {
            let cell = if b.hulled {
                // Hulled B: one hulled cell suffices (vertex sums + ball).
                let shifted = minkowski(&b.with_hull(), &ball)?;
                best = best.min(shifted.distance(va)?);
                break;
            } else {
                let verts = ball
                    .vertices
                    .iter()
                    .map(|d| linalg::add(vb, d))
                    .collect::<Vec<_>>();
                ConicPolytope::new(b.dim, verts, b.rays.clone(), true)?
            };
            best = best.min(cell.distance(va)?);
        }
        if best > value || attaining.is_none() {
            value = best;
            attaining = Some(va.clone());
        }
    }
    Ok(ExcessValue {
        value,
        attaining_vertex: attaining,
    })
}

/// `r in cone(dirs)` via a sup-norm LP on the normalized ray.
pub fn ray_in_cone(r: &[f64], dirs: &[Point], tol: f64) -> bool {
    let rn = match linalg::normalized(r) {
        Some(v) => v,
        None => return true,
    };
    let dirs_n: Vec<Point> = dirs
        .iter()
        .filter_map(|d| linalg::normalized(d))
        .collect();
    let empty: [Point; 0] = [];
    min_inf_residual(&empty, &dirs_n, &rn, false) <= tol
}

/// Minimal sup-norm residual `min_t || V lam + R mu - p ||_inf` with
/// `lam >= 0, sum lam = 1` (when `simplex`), `mu >= 0`, as an LP value.
fn min_inf_residual(vertices: &[Point], rays: &[Point], p: &[f64], simplex: bool) -> f64 {
    let dim = p.len();
    let nv = vertices.len();
    let nr = rays.len();
    let n = nv + nr + 1; // lam, mu, t
    let mut obj = vec![0.0; n];
    obj[n - 1] = 1.0;
    let mut lp = lp::Lp::minimize(n, obj);
    for i in 0..dim {
        // (V lam + R mu)_i - t <= p_i  and  -(V lam + R mu)_i - t <= -p_i
        let mut row = vec![0.0; n];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v[i];
        }
        for (j, r) in rays.iter().enumerate() {
            row[nv + j] = r[i];
        }
        row[n - 1] = -1.0;
        let mut neg = row.iter().map(|x| -x).collect::<Vec<_>>();
        neg[n - 1] = -1.0;
        lp.push_le(row, p[i]);
        lp.push_le(neg, -p[i]);
    }
    if simplex {
        let mut row = vec![0.0; n];
        for r in row.iter_mut().take(nv) {
            *r = 1.0;
        }
        lp.push_eq(row, 1.0);
    }
    match lp::solve(&lp) {
        lp::LpOutcome::Optimal { value, .. } => value.max(0.0),
        _ => f64::INFINITY,
    }
}

fn check_same_dim(a: &ConicPolytope, b: &ConicPolytope, context: &'static str) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            context: match context {
                "excess" => "excess operands",
                "minkowski" => "minkowski operands",
                _ => "set operands",
            },
            expected: a.dim,
            got: b.dim,
        });
    }
    Ok(())
}

pub fn dedup_points(points: &mut Vec<Point>, tol: f64) {
    let mut kept: Vec<Point> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        if !kept
            .iter()
            .any(|q| linalg::norm_inf(&linalg::sub(&p, q)) <= tol)
        {
            kept.push(p);
        }
    }
    *points = kept;
}

fn dedup_directions(rays: &mut Vec<Point>) {
    let mut kept: Vec<Point> = Vec::new();
    let mut kept_n: Vec<Point> = Vec::new();
    for r in rays.drain(..) {
        let rn = match linalg::normalized(&r) {
            Some(v) => v,
            None => continue,
        };
        if !kept_n
            .iter()
            .any(|q| linalg::norm_inf(&linalg::sub(&rn, q)) <= 1e-10)
        {
            kept.push(r);
            kept_n.push(rn);
        }
    }
    *rays = kept;
}

/// Default membership tolerance used by higher-level checks.
pub fn default_member_tol() -> f64 {
    DIST_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrant_rays() -> Vec<Point> {
        vec![vec![1.0, 0.0], vec![0.0, 1.0]]
    }

    #[test]
    fn member_hulled_strip() {
        // hulled {(0,0),(2,0)} + ray (0,1): contains (1,1).
        let s = ConicPolytope::new(
            2,
            vec![vec![0.0, 0.0], vec![2.0, 0.0]],
            vec![vec![0.0, 1.0]],
            true,
        )
        .unwrap();
        assert!(s.member(&[1.0, 1.0], 1e-9).unwrap());
        assert!(!s.member(&[3.0, 1.0], 1e-9).unwrap());
    }

    #[test]
    fn member_non_hulled_counterexample_geometry() {
        // {(2,0),(0,2)} + R^2_+ does not contain (1,1).
        let s = ConicPolytope::new(
            2,
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            quadrant_rays(),
            false,
        )
        .unwrap();
        assert!(!s.member(&[1.0, 1.0], 1e-9).unwrap());
        assert!(s.member(&[2.5, 0.5], 1e-9).unwrap());
    }

    #[test]
    fn member_outside_quadrant() {
        let s = ConicPolytope::cone_at(vec![0.0, 0.0], quadrant_rays()).unwrap();
        assert!(!s.member(&[-1.0, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn distance_to_translated_quadrant() {
        // d((1,1), (2,0)+R^2_+) = 1 (projection (2,1)).
        let s = ConicPolytope::cone_at(vec![2.0, 0.0], quadrant_rays()).unwrap();
        let d = s.distance(&[1.0, 1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
    }

    #[test]
    fn distance_zero_inside() {
        let s = ConicPolytope::cone_at(vec![0.0, 0.0], quadrant_rays()).unwrap();
        assert!(s.distance(&[0.5, 2.0]).unwrap() < 1e-10);
    }

    #[test]
    fn distance_two_cones_min_rule() {
        let s = ConicPolytope::new(
            2,
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            quadrant_rays(),
            false,
        )
        .unwrap();
        let d = s.distance(&[1.0, 1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
    }

    #[test]
    fn excess_counterexample_value() {
        let a = ConicPolytope::singleton(vec![1.0, 1.0]);
        let b = ConicPolytope::new(
            2,
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            quadrant_rays(),
            false,
        )
        .unwrap();
        let e = excess(&a, &b).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8);
        assert_eq!(e.attaining_vertex.unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn excess_self_is_zero() {
        let a = ConicPolytope::new(
            2,
            vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            quadrant_rays(),
            false,
        )
        .unwrap();
        assert!(excess(&a, &a).unwrap().value < 1e-9);
    }

    #[test]
    fn excess_corner_geometry() {
        // A = (x,-2) + cone{(0,1)} + R^2_+, B = R^2_+ from origin: excess 2.
        for x in [0.5, 1.0, 3.0] {
            let a = ConicPolytope::new(
                2,
                vec![vec![x, -2.0]],
                vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]],
                false,
            )
            .unwrap();
            let b = ConicPolytope::cone_at(vec![0.0, 0.0], quadrant_rays()).unwrap();
            let e = excess(&a, &b).unwrap();
            assert!((e.value - 2.0).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn excess_infinite_on_recession_escape() {
        let a = ConicPolytope::cone_at(vec![0.0, 0.0], vec![vec![-1.0, 0.0]]).unwrap();
        let b = ConicPolytope::cone_at(vec![0.0, 0.0], quadrant_rays()).unwrap();
        assert!(excess(&a, &b).unwrap().is_infinite());
    }

    #[test]
    fn excess_rejects_hulled_into_non_hulled() {
        let a = ConicPolytope::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![], true).unwrap();
        let b = ConicPolytope::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![], false).unwrap();
        assert!(matches!(
            excess(&a, &b),
            Err(Error::UnsupportedShape(_))
        ));
    }

    #[test]
    fn minkowski_point_plus_cone() {
        let a = ConicPolytope::singleton(vec![1.0, 1.0]);
        let b = ConicPolytope::cone_at(vec![0.0, 0.0], quadrant_rays()).unwrap();
        let s = minkowski(&a, &b).unwrap();
        assert_eq!(s.vertices, vec![vec![1.0, 1.0]]);
        assert_eq!(s.rays.len(), 2);
        assert!(!s.hulled);
    }

    #[test]
    fn minkowski_identity_like() {
        let a = ConicPolytope::singleton(vec![0.0]);
        let b = ConicPolytope::singleton(vec![1.0]);
        let s = minkowski(&a, &b).unwrap();
        assert_eq!(s.vertices, vec![vec![1.0]]);
    }

    #[test]
    fn affine_image_identity_and_zero() {
        let s = ConicPolytope::cone_at(vec![1.0, 2.0], quadrant_rays()).unwrap();
        let id = affine_image(&LinOp::identity(2), &[0.0, 0.0], &s).unwrap();
        assert_eq!(id, s);
        let z = affine_image(&LinOp::zero(2, 2), &[3.0, 4.0], &s).unwrap();
        assert_eq!(z.vertices, vec![vec![3.0, 4.0]]);
        assert!(z.rays.is_empty());
    }

    #[test]
    fn affine_image_rotation_of_quadrant() {
        let rot = LinOp::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let s = ConicPolytope::cone_at(vec![0.0, 0.0], quadrant_rays()).unwrap();
        let r = affine_image(&rot, &[0.0, 0.0], &s).unwrap();
        assert!(r.member(&[-1.0, 1.0], 1e-9).unwrap());
        assert!(!r.member(&[1.0, 1.0], 1e-9).unwrap());
    }

    #[test]
    fn scaled_ball_shapes() {
        let b1 = scaled_ball(1, 1.0).unwrap();
        assert_eq!(b1.vertices.len(), 2);
        let b0 = scaled_ball(3, 0.0).unwrap();
        assert_eq!(b0.vertices, vec![vec![0.0, 0.0, 0.0]]);
        assert!(scaled_ball(2, -1.0).is_err());
        let oct = scaled_ball_refined(2, 2.0, 8).unwrap();
        assert_eq!(oct.vertices.len(), 8);
        let th = std::f64::consts::PI / 4.0;
        assert!((oct.vertices[1][0] - 2.0 * th.cos()).abs() < 1e-12);
        assert!((oct.vertices[1][1] - 2.0 * th.sin()).abs() < 1e-12);
    }

    #[test]
    fn enlargement_membership_guarantee() {
        // d(p, B) <= eps/sqrt(dim) implies p is in the cross-ball enlargement.
        let b = ConicPolytope::new(
            2,
            vec![vec![0.0, 0.0], vec![3.0, 0.0]],
            vec![vec![0.0, 1.0]],
            false,
        )
        .unwrap();
        let eps = 0.5;
        let p = vec![0.2, -0.2]; // distance 0.2 < eps/sqrt(2)
        assert!(b.distance(&p).unwrap() <= eps / 2f64.sqrt());
        let e = excess_into_enlargement(&ConicPolytope::singleton(p), &b, eps).unwrap();
        assert!(e.value < 1e-8);
    }

    #[test]
    fn constructor_rejects_empty_and_drops_zero_rays() {
        assert!(matches!(
            ConicPolytope::new(2, vec![], vec![], false),
            Err(Error::EmptyVertexSet)
        ));
        let s = ConicPolytope::new(
            2,
            vec![vec![0.0, 0.0]],
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            false,
        )
        .unwrap();
        assert_eq!(s.rays.len(), 1);
    }
}
