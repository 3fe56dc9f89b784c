//! Dense tableau simplex for the small linear programs in this crate.
//!
//! Solves `maximize c.x subject to rows.x <= b, x >= 0` where `b >= 0`, so
//! the slack basis is feasible and no phase one is needed. Bland's rule is
//! used throughout; it is slower than steepest-edge pivoting but cannot
//! cycle, and our instances are tiny. An iteration guard turns pathological
//! input into `SolverFailure` instead of a hang.

use crate::error::{Error, Result};

/// Reduced costs larger than this (in absolute value) count as improving.
const ENTER_TOLERANCE: f64 = 1e-9;
/// Pivot entries smaller than this are treated as zero in the ratio test.
const PIVOT_TOLERANCE: f64 = 1e-11;
const MAX_ITERATIONS: usize = 200_000;

#[derive(Debug)]
pub(crate) struct SimplexSolution {
    pub objective: f64,
    pub primal: Vec<f64>,
}

/// Maximize `c.x` over `rows.x <= b`, `x >= 0`. Requires `b >= 0` entrywise.
pub(crate) fn maximize(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Result<SimplexSolution> {
    let n = c.len();
    let m = rows.len();
    assert_eq!(b.len(), m, "right-hand side length mismatch");
    for row in rows {
        assert_eq!(row.len(), n, "constraint row length mismatch");
    }
    assert!(
        b.iter().all(|x| x.is_finite() && *x >= 0.0),
        "slack basis requires nonnegative right-hand sides"
    );

    // Tableau columns: n structural variables, m slacks, rhs. Row m is the
    // objective row storing z_j - c_j; it starts at -c and the basis at the
    // slacks, which is feasible because b >= 0.
    let width = n + m + 1;
    let mut t = vec![vec![0.0f64; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&rows[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..MAX_ITERATIONS {
        // Bland: entering variable is the lowest-index improving column.
        let Some(enter) = (0..n + m).find(|&j| t[m][j] < -ENTER_TOLERANCE) else {
            let mut primal = vec![0.0; n];
            for (i, &bj) in basis.iter().enumerate() {
                if bj < n {
                    primal[bj] = t[i][width - 1];
                }
            }
            return Ok(SimplexSolution {
                objective: t[m][width - 1],
                primal,
            });
        };

        // Ratio test; ties broken by the smallest basis label (Bland).
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i][enter];
            if a <= PIVOT_TOLERANCE {
                continue;
            }
            let ratio = t[i][width - 1] / a;
            match leave {
                None => leave = Some((i, ratio)),
                Some((best, best_ratio)) => {
                    if ratio < best_ratio - PIVOT_TOLERANCE
                        || (ratio < best_ratio + PIVOT_TOLERANCE && basis[i] < basis[best])
                    {
                        leave = Some((i, ratio));
                    }
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(Error::SolverFailure {
                details: "linear program is unbounded along an improving direction".into(),
            });
        };

        let p = t[pivot_row][enter];
        for x in &mut t[pivot_row] {
            *x /= p;
        }
        for i in 0..=m {
            if i == pivot_row {
                continue;
            }
            let f = t[i][enter];
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                t[i][j] -= f * t[pivot_row][j];
            }
        }
        basis[pivot_row] = enter;
    }

    Err(Error::SolverFailure {
        details: format!("simplex exceeded {MAX_ITERATIONS} iterations"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_constraints() {
        let sol = maximize(&[1.0, 1.0], &[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 2.0]).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-12);
        assert!((sol.primal[0] - 1.0).abs() < 1e-12);
        assert!((sol.primal[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coupled_constraints() {
        let sol = maximize(
            &[3.0, 2.0],
            &[vec![1.0, 1.0], vec![1.0, 0.0]],
            &[4.0, 2.0],
        )
        .unwrap();
        assert!((sol.objective - 10.0).abs() < 1e-12);
    }

    #[test]
    fn beale_degenerate_example_terminates() {
        // Classic cycling example for naive pivoting; Bland must reach the
        // optimum 1/20 at x = (1/25, 0, 1, 0).
        let c = [0.75, -150.0, 0.02, -6.0];
        let rows = vec![
            vec![0.25, -60.0, -0.04, 9.0],
            vec![0.5, -90.0, -0.02, 3.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let sol = maximize(&c, &rows, &[0.0, 0.0, 1.0]).unwrap();
        assert!((sol.objective - 0.05).abs() < 1e-12);
        assert!((sol.primal[0] - 0.04).abs() < 1e-12);
        assert!((sol.primal[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_reported() {
        let err = maximize(&[1.0], &[vec![-1.0]], &[1.0]).unwrap_err();
        assert!(matches!(err, Error::SolverFailure { .. }));
    }

    #[test]
    fn zero_objective_stays_at_origin() {
        let sol = maximize(&[0.0, 0.0], &[vec![1.0, 1.0]], &[1.0]).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert_eq!(sol.primal, vec![0.0, 0.0]);
    }
}
