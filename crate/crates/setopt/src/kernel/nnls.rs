//! Active-set nonnegative least squares (Lawson–Hanson) on small dense data,
//! plus the simplex-constrained variant used for distances to hulled sets.

use crate::linalg::{dot, lstsq_columns, norm2, solve_dense, sub};

/// Solve `min ||A x - b||_2  s.t.  x >= 0` where `A` is given by columns.
/// Returns the solution and the residual norm.
pub fn nnls(cols: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, f64) {
    let n = cols.len();
    let m = b.len();
    let mut x = vec![0.0; n];
    if n == 0 {
        return (x, norm2(b));
    }
    let mut passive = vec![false; n];
    let tol = 1e-12 * (1.0 + norm2(b));
    let max_iter = 6 * n + 30;

    for _ in 0..max_iter {
        // Dual vector w = A^T (b - A x).
        let mut resid = b.to_vec();
        for j in 0..n {
            if x[j] != 0.0 {
                for i in 0..m {
                    resid[i] -= cols[j][i] * x[j];
                }
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !passive[j] {
                let w = dot(&cols[j], &resid);
                if w > tol && best.map_or(true, |(_, bw)| w > bw) {
                    best = Some((j, w));
                }
            }
        }
        let j_in = match best {
            Some((j, _)) => j,
            None => break,
        };
        passive[j_in] = true;

        // Inner loop: restrict to the passive set and restore feasibility.
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub_cols: Vec<Vec<f64>> = idx.iter().map(|&j| cols[j].clone()).collect();
            let z = match lstsq_columns(&sub_cols, b, 1e-13) {
                Some(z) => z,
                None => {
                    // Dependent column; reject the newest candidate.
                    passive[j_in] = false;
                    break;
                }
            };
            if z.iter().all(|&v| v > tol) {
                for v in x.iter_mut() {
                    *v = 0.0;
                }
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z[k];
                }
                break;
            }
            // Step back to the boundary of the feasible region.
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if z[k] <= tol {
                    let denom = x[j] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                passive[j_in] = false;
                break;
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }

    let mut resid = b.to_vec();
    for j in 0..n {
        if x[j] != 0.0 {
            for i in 0..m {
                resid[i] -= cols[j][i] * x[j];
            }
        }
    }
    (x, norm2(&resid))
}

/// Distance from `p` to `cone(cols)` (the set `{ C mu : mu >= 0 }`).
pub fn distance_to_cone(cols: &[Vec<f64>], p: &[f64]) -> f64 {
    nnls(cols, p).1
}

/// Solve `min || V lam + R mu - p ||_2  s.t.  lam >= 0, sum lam = 1, mu >= 0`,
/// the projection onto `conv(V) + cone(R)`. Returns `(lam, mu, distance)`.
///
/// Primal active-set method for the one-equality-constrained NNLS: each step
/// solves the KKT system of the passive set exactly, walks back to the
/// feasible boundary when a coefficient turns negative, and enters the column
/// with the most negative reduced gradient until dual feasibility holds.
pub fn project_hulled(
    vertices: &[Vec<f64>],
    rays: &[Vec<f64>],
    p: &[f64],
) -> (Vec<f64>, Vec<f64>, f64) {
    let nv = vertices.len();
    let nr = rays.len();
    let n = nv + nr;
    let dim = p.len();
    assert!(nv > 0);
    let col = |j: usize| -> &Vec<f64> {
        if j < nv {
            &vertices[j]
        } else {
            &rays[j - nv]
        }
    };

    // Feasible start: the nearest single vertex.
    let start = (0..nv)
        .min_by(|&i, &j| {
            let di = crate::linalg::dist2(&vertices[i], p);
            let dj = crate::linalg::dist2(&vertices[j], p);
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap();
    let mut x = vec![0.0; n];
    x[start] = 1.0;
    let mut passive = vec![false; n];
    passive[start] = true;

    let tol = 1e-10 * (1.0 + norm2(p));
    let max_outer = 6 * (n + 2) + 40;
    for _ in 0..max_outer {
        // Inner loop: restore primal feasibility on the passive set.
        let mut nu = 0.0;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sol = match kkt_solve(vertices, rays, p, &idx) {
                Some(s) => s,
                None => {
                    // Singular system: drop the most recent ray-like column
                    // or a duplicate vertex; fall back to the current point.
                    if let Some(&j) = idx.iter().rev().find(|&&j| x[j] <= tol) {
                        passive[j] = false;
                        continue;
                    }
                    break;
                }
            };
            let (z, zn) = sol;
            nu = zn;
            if z.iter().all(|&v| v >= -tol) {
                for v in x.iter_mut() {
                    *v = 0.0;
                }
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = z[k].max(0.0);
                }
                break;
            }
            // Walk from x toward z until the first coefficient hits zero.
            let mut alpha = 1.0_f64;
            let mut leave = None;
            for (k, &j) in idx.iter().enumerate() {
                if z[k] < -tol {
                    let a = x[j] / (x[j] - z[k]);
                    if a < alpha {
                        alpha = a;
                        leave = Some(j);
                    }
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
                if x[j] < tol {
                    x[j] = 0.0;
                }
            }
            match leave {
                Some(j) => passive[j] = false,
                None => break,
            }
        }

        // Dual feasibility: reduced gradient of every excluded column.
        let mut resid = p.to_vec();
        for j in 0..n {
            if x[j] != 0.0 {
                for i in 0..dim {
                    resid[i] -= col(j)[i] * x[j];
                }
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if passive[j] {
                continue;
            }
            let a_j = if j < nv { 1.0 } else { 0.0 };
            // Stationarity residual: -col.r + nu*a_j should be >= 0.
            let c = -dot(col(j), &resid) + nu * a_j;
            let scale = 1.0 + norm2(col(j));
            if c < -1e-10 * scale && best.map_or(true, |(_, bc)| c < bc) {
                best = Some((j, c));
            }
        }
        match best {
            Some((j, _)) => passive[j] = true,
            None => break,
        }
    }

    let mut proj = vec![0.0; dim];
    for j in 0..n {
        if x[j] != 0.0 {
            for i in 0..dim {
                proj[i] += col(j)[i] * x[j];
            }
        }
    }
    let lam = x[..nv].to_vec();
    let mu = x[nv..].to_vec();
    (lam, mu, norm2(&sub(p, &proj)))
}

/// Equality-constrained least squares on the support columns:
/// `min || M t - p ||  s.t.  sum of vertex entries of t = 1`, via the KKT
/// system `[G a; a^T 0][t; nu] = [M^T p; 1]`. Returns `(t, nu)`.
fn kkt_solve(
    vertices: &[Vec<f64>],
    rays: &[Vec<f64>],
    p: &[f64],
    support: &[usize],
) -> Option<(Vec<f64>, f64)> {
    let nv = vertices.len();
    let k = support.len();
    if k == 0 {
        return None;
    }
    let cols: Vec<&Vec<f64>> = support
        .iter()
        .map(|&j| if j < nv { &vertices[j] } else { &rays[j - nv] })
        .collect();
    let mut kkt = vec![vec![0.0; k + 1]; k + 1];
    let mut rhs = vec![0.0; k + 1];
    for i in 0..k {
        for j in 0..k {
            kkt[i][j] = dot(cols[i], cols[j]);
        }
        kkt[i][k] = if support[i] < nv { 1.0 } else { 0.0 };
        kkt[k][i] = kkt[i][k];
        rhs[i] = dot(cols[i], p);
    }
    rhs[k] = 1.0;
    let sol = solve_dense(&kkt, &rhs, 1e-12)?;
    let nu = sol[k];
    Some((sol[..k].to_vec(), nu))
}
