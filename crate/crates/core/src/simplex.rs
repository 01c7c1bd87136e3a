//! Dense primal simplex for `max c^T x` subject to `A x <= b`, `x >= 0`,
//! `b >= 0`.
//!
//! The origin is feasible because `b` is non-negative, so no phase one is
//! needed. Bland's rule picks the entering and leaving variables, which rules
//! out cycling on degenerate problems. Values within [`TOLERANCE`] of zero are
//! treated as zero.

use thiserror::Error;

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("objective is unbounded")]
    Unbounded,
    #[error("constraint {row} has a negative right-hand side")]
    NegativeRhs { row: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(LpError::Shape(format!("{m} rows but {} right-hand sides", b.len())));
    }
    if let Some(row) = a.iter().position(|r| r.len() != n) {
        return Err(LpError::Shape(format!("row {row} has {} entries, expected {n}", a[row].len())));
    }
    if let Some(row) = b.iter().position(|&v| !(v >= 0.0)) {
        return Err(LpError::NegativeRhs { row });
    }

    // Columns: n structural, m slack, then the right-hand side.
    let width = n + m + 1;
    let mut tableau: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, &rhs))| {
            let mut t = vec![0.0; width];
            t[..n].copy_from_slice(row);
            t[n + i] = 1.0;
            t[width - 1] = rhs;
            t
        })
        .collect();
    let mut cost = vec![0.0; width];
    for (j, &cj) in c.iter().enumerate() {
        cost[j] = -cj;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..width - 1).find(|&j| cost[j] < -TOLERANCE) else { break };
        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[enter] > TOLERANCE {
                let ratio = row[width - 1] / row[enter];
                let better = match leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < best - TOLERANCE || (ratio <= best + TOLERANCE && basis[i] < basis[k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else { return Err(LpError::Unbounded) };
        pivot(&mut tableau, &mut cost, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tableau[i][width - 1].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}

fn pivot(tableau: &mut [Vec<f64>], cost: &mut [f64], row: usize, col: usize) {
    let p = tableau[row][col];
    for v in tableau[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = tableau[row].clone();
    let eliminate = |target: &mut [f64]| {
        let factor = target[col];
        if factor != 0.0 {
            for (t, pv) in target.iter_mut().zip(&pivot_row) {
                *t -= factor * pv;
            }
            target[col] = 0.0;
        }
    };
    for (i, r) in tableau.iter_mut().enumerate() {
        if i != row {
            eliminate(r);
        }
    }
    eliminate(cost);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
        let sol = maximize(&[3.0, 5.0], &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]], &[4.0, 12.0, 18.0]).unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn detects_unbounded() {
        assert_eq!(maximize(&[1.0, 0.0], &[vec![-1.0, 1.0]], &[1.0]), Err(LpError::Unbounded));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(maximize(&[1.0], &[vec![1.0]], &[-1.0]), Err(LpError::NegativeRhs { row: 0 }));
        assert!(matches!(maximize(&[1.0], &[vec![1.0, 2.0]], &[1.0]), Err(LpError::Shape(_))));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Several constraints tight at the origin.
        let a = vec![vec![0.5, -5.5, -2.5, 9.0], vec![0.5, -1.5, -0.5, 1.0], vec![1.0, 0.0, 0.0, 0.0]];
        let sol = maximize(&[10.0, -57.0, -9.0, -24.0], &a, &[0.0, 0.0, 1.0]).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matches_vertex_enumeration_in_two_dimensions() {
        let mut rng = Prng::new(12);
        for _ in 0..200 {
            let rows = 2 + rng.below(4);
            let a: Vec<Vec<f64>> = (0..rows).map(|_| vec![rng.range(0.1, 3.0), rng.range(0.1, 3.0)]).collect();
            let b: Vec<f64> = (0..rows).map(|_| rng.range(0.5, 5.0)).collect();
            let c = [rng.range(-1.0, 3.0), rng.range(-1.0, 3.0)];
            let sol = maximize(&c, &a, &b).unwrap();
            // Candidate vertices: intersections of any two boundary lines,
            // including the axes.
            let mut lines: Vec<([f64; 2], f64)> = a.iter().zip(&b).map(|(r, &v)| ([r[0], r[1]], v)).collect();
            lines.push(([1.0, 0.0], 0.0));
            lines.push(([0.0, 1.0], 0.0));
            let mut best = f64::NEG_INFINITY;
            for i in 0..lines.len() {
                for j in i + 1..lines.len() {
                    let ([a1, b1], c1) = lines[i];
                    let ([a2, b2], c2) = lines[j];
                    let det = a1 * b2 - a2 * b1;
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let x = (c1 * b2 - c2 * b1) / det;
                    let y = (a1 * c2 - a2 * c1) / det;
                    let feasible = x >= -1e-9 && y >= -1e-9 && a.iter().zip(&b).all(|(r, &v)| r[0] * x + r[1] * y <= v + 1e-9);
                    if feasible {
                        best = best.max(c[0] * x + c[1] * y);
                    }
                }
            }
            assert!((sol.objective - best).abs() < 1e-7 * best.abs().max(1.0));
        }
    }
}
