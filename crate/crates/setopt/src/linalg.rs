//! Small dense vector/matrix helpers shared by the kernels.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(s: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    norm2(&sub(a, b))
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm2(a);
    if n <= 1e-300 {
        None
    } else {
        Some(scale(1.0 / n, a))
    }
}

/// Solve `A x = b` for square dense `A` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `tol`.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let (piv, &ref _row) = m[col..]
            .iter()
            .enumerate()
            .max_by(|(_, r1), (_, r2)| r1[col].abs().partial_cmp(&r2[col].abs()).unwrap())
            .map(|(i, r)| (i + col, r))
            .unwrap();
        if m[piv][col].abs() < tol {
            return None;
        }
        m.swap(col, piv);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Numerical rank of the row set `rows` (vectors of equal length), via
/// Gaussian elimination with a relative pivot threshold.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m[0].len();
    let mut r = 0;
    for col in 0..ncols {
        if r >= m.len() {
            break;
        }
        let piv = (r..m.len())
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col].abs() < tol {
            continue;
        }
        m.swap(r, piv);
        for row in 0..m.len() {
            if row == r {
                continue;
            }
            let f = m[row][col] / m[r][col];
            if f != 0.0 {
                for k in col..ncols {
                    m[row][k] -= f * m[r][k];
                }
            }
        }
        r += 1;
    }
    r
}

/// Least-squares solution of `min ||A x - b||_2` for a tall/small dense `A`
/// given by columns, via the normal equations. Rank-deficient systems return
/// `None`.
pub fn lstsq_columns(cols: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let k = cols.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dot(&cols[i], &cols[j])).collect())
        .collect();
    let rhs: Vec<f64> = (0..k).map(|i| dot(&cols[i], b)).collect();
    solve_dense(&gram, &rhs, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_dense(&a, &[5.0, 10.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_system_is_rejected() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_dense(&a, &[1.0, 2.0], 1e-12).is_none());
    }

    #[test]
    fn rank_counts_independent_rows() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(rank(&rows, 1e-12), 2);
        assert_eq!(rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-9), 1);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let cols = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
        let x = lstsq_columns(&cols, &[1.0, 2.0, 3.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-10);
        assert!((x[1] - 2.0).abs() < 1e-10);
    }
}
