//! Problem-file format and expression-tree evaluator.
//!
//! A problem is a JSON document declaring the two space dimensions, the
//! ordering cone, named set-valued maps as expression trees, named scalar
//! expressions, candidate operators, an optional constraint set, and the
//! sampling schedule. The full schema is documented in `docs/format.md`;
//! field names here are the schema.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cones::PolyCone;
use crate::error::{Error, Result};
use crate::geometry::{self, ConicPolytope, Point};
use crate::linalg;
use crate::linop::LinOp;
use crate::maps::SamplingSchedule;

/// Cone declaration as written in the file; duals are enumerated when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub generators: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_generators: Option<Vec<Point>>,
}

impl ConeSpec {
    pub fn build(&self, dim: usize) -> Result<PolyCone> {
        match &self.dual_generators {
            Some(d) => PolyCone::with_dual_generators(dim, self.generators.clone(), d.clone()),
            None => PolyCone::new(dim, self.generators.clone()),
        }
    }
}

/// Set-valued map expression tree. Every node evaluates to a set in the image
/// space; `ref` nodes name other maps of the same file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapExpr {
    /// A fixed set, independent of the argument.
    ConstSet { set: ConicPolytope },
    /// Child plus the ordering cone's rays.
    Epi { child: Box<MapExpr> },
    /// Minkowski sum of the children.
    Sum { children: Vec<MapExpr> },
    /// The singleton `{T x + b}`.
    AffineArg { t: LinOp, b: Point },
    /// The singleton `{s(x) e}`.
    ScalarDir { scalar: Box<ScalarExpr>, e: Point },
    /// Child scaled by a constant.
    Scale { lambda: f64, child: Box<MapExpr> },
    /// `nonneg_child` when `guard(x) > 0`, else `neg_child`.
    Branch {
        guard: Box<ScalarExpr>,
        nonneg_child: Box<MapExpr>,
        neg_child: Box<MapExpr>,
    },
    /// Reference to a named map.
    Ref { name: String },
}

/// Scalar expression tree over the argument space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarExpr {
    Const { value: f64 },
    /// `x[index]`.
    Coord { index: usize },
    /// `w . x + c`.
    Affine { weights: Vec<f64>, offset: f64 },
    /// `|| x - center ||_2`.
    Norm { center: Point },
    /// Distance to a union of pieces in the argument space.
    DistToSet { pieces: Vec<ConicPolytope> },
    Min { children: Vec<ScalarExpr> },
    Max { children: Vec<ScalarExpr> },
    Sum { children: Vec<ScalarExpr> },
    /// Product by a constant.
    ScaleBy { factor: f64, child: Box<ScalarExpr> },
    /// Product of the children (lets the format express powers like `x^2`).
    Mul { children: Vec<ScalarExpr> },
    /// Reference to a named scalar.
    Ref { name: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub dim_x: usize,
    pub dim_y: usize,
    pub cone: ConeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_e: Option<Point>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapExpr>,
    #[serde(default)]
    pub scalars: BTreeMap<String, ScalarExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_set: Option<Vec<ConicPolytope>>,
    #[serde(default)]
    pub candidates: BTreeMap<String, LinOp>,
    #[serde(default)]
    pub schedule: SamplingSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Point>,
}

/// Evaluation context: the built cone plus the named trees for `ref` nodes.
pub struct Env<'a> {
    pub cone: &'a PolyCone,
    pub maps: &'a BTreeMap<String, MapExpr>,
    pub scalars: &'a BTreeMap<String, ScalarExpr>,
}

pub fn parse(text: &str) -> Result<ProblemFile> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("unknown variant") {
            Error::UnknownNodeKind(msg)
        } else {
            Error::Syntax(msg)
        }
    })?;
    file.validate()?;
    Ok(file)
}

pub fn serialize(file: &ProblemFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("problem files always serialize");
    s.push('\n');
    s
}

impl ProblemFile {
    pub fn build_cone(&self) -> Result<PolyCone> {
        self.cone.build(self.dim_y)
    }

    pub fn env<'a>(&'a self, cone: &'a PolyCone) -> Env<'a> {
        Env {
            cone,
            maps: &self.maps,
            scalars: &self.scalars,
        }
    }

    pub fn map(&self, name: &str) -> Result<&MapExpr> {
        self.maps
            .get(name)
            .ok_or_else(|| Error::DanglingReference(name.to_string()))
    }

    pub fn candidate(&self, name: &str) -> Result<&LinOp> {
        self.candidates
            .get(name)
            .ok_or_else(|| Error::DanglingReference(name.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_x == 0 || self.dim_y == 0 {
            return Err(Error::Syntax("dimensions must be positive".into()));
        }
        let cone = self.build_cone()?;
        if let Some(e) = &self.direction_e {
            crate::cones::Direction::in_cone(e.clone(), &cone)?;
        }
        if let Some(p) = &self.base_point {
            expect_dim("base_point", self.dim_x, p.len())?;
        }
        if let Some(pieces) = &self.constraint_set {
            if pieces.is_empty() {
                return Err(Error::Syntax("constraint_set must have pieces".into()));
            }
            for piece in pieces {
                expect_dim("constraint piece", self.dim_x, piece.dim)?;
            }
        }
        for t in self.candidates.values() {
            expect_dim("candidate columns", self.dim_x, t.cols)?;
            expect_dim("candidate rows", self.dim_y, t.rows)?;
        }
        self.schedule.validate()?;
        for name in self.scalars.keys() {
            let mut stack = BTreeSet::new();
            self.check_scalar(&self.scalars[name], &mut stack)?;
        }
        for name in self.maps.keys() {
            let mut stack = BTreeSet::new();
            self.check_map(&self.maps[name], &mut stack)?;
        }
        Ok(())
    }

    fn check_map(&self, expr: &MapExpr, stack: &mut BTreeSet<String>) -> Result<()> {
        match expr {
            MapExpr::ConstSet { set } => expect_dim("const_set", self.dim_y, set.dim),
            MapExpr::Epi { child } | MapExpr::Scale { child, .. } => self.check_map(child, stack),
            MapExpr::Sum { children } => {
                if children.is_empty() {
                    return Err(Error::Syntax("sum needs at least one child".into()));
                }
                children.iter().try_for_each(|c| self.check_map(c, stack))
            }
            MapExpr::AffineArg { t, b } => {
                expect_dim("affine_arg operator columns", self.dim_x, t.cols)?;
                expect_dim("affine_arg operator rows", self.dim_y, t.rows)?;
                expect_dim("affine_arg shift", self.dim_y, b.len())
            }
            MapExpr::ScalarDir { scalar, e } => {
                expect_dim("scalar_dir direction", self.dim_y, e.len())?;
                let mut sstack = BTreeSet::new();
                self.check_scalar(scalar, &mut sstack)
            }
            MapExpr::Branch {
                guard,
                nonneg_child,
                neg_child,
            } => {
                let mut sstack = BTreeSet::new();
                self.check_scalar(guard, &mut sstack)?;
                self.check_map(nonneg_child, stack)?;
                self.check_map(neg_child, stack)
            }
            MapExpr::Ref { name } => {
                if stack.contains(name) {
                    return Err(Error::CyclicReference(name.clone()));
                }
                let target = self
                    .maps
                    .get(name)
                    .ok_or_else(|| Error::DanglingReference(name.clone()))?;
                stack.insert(name.clone());
                let r = self.check_map(target, stack);
                stack.remove(name);
                r
            }
        }
    }

    fn check_scalar(&self, expr: &ScalarExpr, stack: &mut BTreeSet<String>) -> Result<()> {
        match expr {
            ScalarExpr::Const { .. } => Ok(()),
            ScalarExpr::Coord { index } => {
                if *index >= self.dim_x {
                    return Err(Error::DimensionMismatch {
                        context: "coord index",
                        expected: self.dim_x,
                        got: *index,
                    });
                }
                Ok(())
            }
            ScalarExpr::Affine { weights, .. } => {
                expect_dim("affine weights", self.dim_x, weights.len())
            }
            ScalarExpr::Norm { center } => expect_dim("norm center", self.dim_x, center.len()),
            ScalarExpr::DistToSet { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::Syntax("dist_to_set needs pieces".into()));
                }
                for piece in pieces {
                    expect_dim("dist_to_set piece", self.dim_x, piece.dim)?;
                }
                Ok(())
            }
            ScalarExpr::Min { children }
            | ScalarExpr::Max { children }
            | ScalarExpr::Sum { children }
            | ScalarExpr::Mul { children } => {
                if children.is_empty() {
                    return Err(Error::Syntax("combinator needs children".into()));
                }
                children
                    .iter()
                    .try_for_each(|c| self.check_scalar(c, stack))
            }
            ScalarExpr::ScaleBy { child, .. } => self.check_scalar(child, stack),
            ScalarExpr::Ref { name } => {
                if stack.contains(name) {
                    return Err(Error::CyclicReference(name.clone()));
                }
                let target = self
                    .scalars
                    .get(name)
                    .ok_or_else(|| Error::DanglingReference(name.clone()))?;
                stack.insert(name.clone());
                let r = self.check_scalar(target, stack);
                stack.remove(name);
                r
            }
        }
    }
}

fn expect_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}

pub fn eval_map(expr: &MapExpr, x: &[f64], env: &Env<'_>) -> Result<ConicPolytope> {
    match expr {
        MapExpr::ConstSet { set } => Ok(set.clone()),
        MapExpr::Epi { child } => {
            let inner = eval_map(child, x, env)?;
            let rays = inner
                .rays
                .iter()
                .chain(env.cone.generators.iter())
                .cloned()
                .collect();
            ConicPolytope::new(inner.dim, inner.vertices, rays, inner.hulled)
        }
        MapExpr::Sum { children } => {
            let mut sets = children.iter().map(|c| eval_map(c, x, env));
            let first = sets.next().expect("validated nonempty")?;
            sets.try_fold(first, |acc, s| geometry::minkowski(&acc, &s?))
        }
        MapExpr::AffineArg { t, b } => {
            Ok(ConicPolytope::singleton(linalg::add(&t.apply(x), b)))
        }
        MapExpr::ScalarDir { scalar, e } => {
            let s = eval_scalar(scalar, x, env)?;
            Ok(ConicPolytope::singleton(linalg::scale(s, e)))
        }
        MapExpr::Scale { lambda, child } => {
            Ok(geometry::scale_set(*lambda, &eval_map(child, x, env)?))
        }
        MapExpr::Branch {
            guard,
            nonneg_child,
            neg_child,
        } => {
            if eval_scalar(guard, x, env)? > 0.0 {
                eval_map(nonneg_child, x, env)
            } else {
                eval_map(neg_child, x, env)
            }
        }
        MapExpr::Ref { name } => {
            let target = env
                .maps
                .get(name)
                .ok_or_else(|| Error::DanglingReference(name.clone()))?;
            eval_map(target, x, env)
        }
    }
}

pub fn eval_scalar(expr: &ScalarExpr, x: &[f64], env: &Env<'_>) -> Result<f64> {
    Ok(match expr {
        ScalarExpr::Const { value } => *value,
        ScalarExpr::Coord { index } => x[*index],
        ScalarExpr::Affine { weights, offset } => linalg::dot(weights, x) + offset,
        ScalarExpr::Norm { center } => linalg::dist2(x, center),
        ScalarExpr::DistToSet { pieces } => {
            let mut best = f64::INFINITY;
            for piece in pieces {
                best = best.min(piece.distance(x)?);
            }
            best
        }
        ScalarExpr::Min { children } => fold_children(children, x, env, f64::min, f64::INFINITY)?,
        ScalarExpr::Max { children } => {
            fold_children(children, x, env, f64::max, f64::NEG_INFINITY)?
        }
        ScalarExpr::Sum { children } => {
            fold_children(children, x, env, |a, b| a + b, 0.0)?
        }
        ScalarExpr::ScaleBy { factor, child } => factor * eval_scalar(child, x, env)?,
        ScalarExpr::Mul { children } => fold_children(children, x, env, |a, b| a * b, 1.0)?,
        ScalarExpr::Ref { name } => {
            let target = env
                .scalars
                .get(name)
                .ok_or_else(|| Error::DanglingReference(name.clone()))?;
            eval_scalar(target, x, env)?
        }
    })
}

fn fold_children(
    children: &[ScalarExpr],
    x: &[f64],
    env: &Env<'_>,
    f: impl Fn(f64, f64) -> f64,
    init: f64,
) -> Result<f64> {
    let mut acc = init;
    for c in children {
        acc = f(acc, eval_scalar(c, x, env)?);
    }
    Ok(acc)
}
