//! Tridiagonal and cyclic-tridiagonal linear solves.
//!
//! The lattice mass matrix `I - r D2` is constant for a run, so the Thomas
//! elimination is factored once and every RK4 stage only does the two O(N)
//! sweeps.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("dimension mismatch: matrix has {expected} rows, right-hand side {got}")]
    Dimension { expected: usize, got: usize },
    #[error("zero or non-finite pivot at row {row}")]
    Pivot { row: usize },
    #[error("matrix needs at least {min} rows, got {got}")]
    TooSmall { min: usize, got: usize },
}

/// LU factors of a tridiagonal matrix (Thomas algorithm, no pivoting).
///
/// Row `i` reads `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1]`; `sub[0]` and
/// `sup[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    sub: Vec<f64>,
    sup_scaled: Vec<f64>,
    pivot: Vec<f64>,
}

impl TridiagonalLu {
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self, SolveError> {
        let n = diag.len();
        if n == 0 {
            return Err(SolveError::TooSmall { min: 1, got: 0 });
        }
        for len in [sub.len(), sup.len()] {
            if len != n {
                return Err(SolveError::Dimension { expected: n, got: len });
            }
        }
        let mut sup_scaled = vec![0.0; n];
        let mut pivot = vec![0.0; n];
        for i in 0..n {
            let p = if i == 0 {
                diag[0]
            } else {
                diag[i] - sub[i] * sup_scaled[i - 1]
            };
            if p == 0.0 || !p.is_finite() {
                return Err(SolveError::Pivot { row: i });
            }
            pivot[i] = p;
            if i + 1 < n {
                sup_scaled[i] = sup[i] / p;
            }
        }
        Ok(Self {
            sub: sub.to_vec(),
            sup_scaled,
            pivot,
        })
    }

    /// Symmetric Toeplitz matrix with constant diagonal and off-diagonal.
    pub fn constant(n: usize, diag: f64, off: f64) -> Result<Self, SolveError> {
        let sub = vec![off; n];
        let sup = vec![off; n];
        let d = vec![diag; n];
        Self::factor(&sub, &d, &sup)
    }

    pub fn len(&self) -> usize {
        self.pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) -> Result<(), SolveError> {
        let n = self.len();
        if rhs.len() != n {
            return Err(SolveError::Dimension {
                expected: n,
                got: rhs.len(),
            });
        }
        rhs[0] /= self.pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.sup_scaled[i] * rhs[i + 1];
        }
        Ok(())
    }
}

/// Factored cyclic tridiagonal matrix: a tridiagonal band plus the two corner
/// entries `A[0][n-1]` and `A[n-1][0]`, handled with a Sherman-Morrison
/// rank-one correction.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonalLu {
    inner: TridiagonalLu,
    correction: Vec<f64>,
    // v = (1, 0, ..., 0, corner_top / gamma)
    v_last: f64,
    denom: f64,
}

impl CyclicTridiagonalLu {
    /// `corner_top = A[0][n-1]`, `corner_bottom = A[n-1][0]`.
    pub fn factor(
        sub: &[f64],
        diag: &[f64],
        sup: &[f64],
        corner_top: f64,
        corner_bottom: f64,
    ) -> Result<Self, SolveError> {
        let n = diag.len();
        if n < 3 {
            return Err(SolveError::TooSmall { min: 3, got: n });
        }
        let gamma = -diag[0];
        if gamma == 0.0 {
            return Err(SolveError::Pivot { row: 0 });
        }
        let mut d = diag.to_vec();
        d[0] -= gamma;
        d[n - 1] -= corner_bottom * corner_top / gamma;
        let inner = TridiagonalLu::factor(sub, &d, sup)?;

        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = corner_bottom;
        inner.solve_in_place(&mut u)?;
        let v_last = corner_top / gamma;
        let denom = 1.0 + u[0] + v_last * u[n - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(SolveError::Pivot { row: n - 1 });
        }
        Ok(Self {
            inner,
            correction: u,
            v_last,
            denom,
        })
    }

    pub fn constant(n: usize, diag: f64, off: f64) -> Result<Self, SolveError> {
        let band = vec![off; n];
        let d = vec![diag; n];
        Self::factor(&band, &d, &band, off, off)
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) -> Result<(), SolveError> {
        self.inner.solve_in_place(rhs)?;
        let n = rhs.len();
        let factor = (rhs[0] + self.v_last * rhs[n - 1]) / self.denom;
        for (x, z) in rhs.iter_mut().zip(&self.correction) {
            *x -= factor * z;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn dense_solve(a: DMatrix<f64>, b: &[f64]) -> Vec<f64> {
        a.lu()
            .solve(&DVector::from_column_slice(b))
            .expect("dense oracle is nonsingular")
            .as_slice()
            .to_vec()
    }

    fn rhs(n: usize) -> Vec<f64> {
        (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect()
    }

    #[test]
    fn thomas_matches_dense_lu() {
        let n = 9;
        let sub: Vec<f64> = (0..n).map(|i| -0.3 - 0.01 * i as f64).collect();
        let sup: Vec<f64> = (0..n).map(|i| -0.2 + 0.02 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.1 * i as f64).collect();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = diag[i];
            if i > 0 {
                a[(i, i - 1)] = sub[i];
            }
            if i + 1 < n {
                a[(i, i + 1)] = sup[i];
            }
        }
        let b = rhs(n);
        let expect = dense_solve(a, &b);
        let lu = TridiagonalLu::factor(&sub, &diag, &sup).unwrap();
        let mut x = b.clone();
        lu.solve_in_place(&mut x).unwrap();
        for (x, e) in x.iter().zip(&expect) {
            assert!((x - e).abs() < 1e-13, "{x} vs {e}");
        }
    }

    #[test]
    fn cyclic_matches_dense_lu() {
        for n in [3usize, 4, 8, 17] {
            let (d, o) = (1.2, -0.1);
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                a[(i, i)] = d;
                a[(i, (i + 1) % n)] += o;
                a[(i, (i + n - 1) % n)] += o;
            }
            let b = rhs(n);
            let expect = dense_solve(a, &b);
            let lu = CyclicTridiagonalLu::constant(n, d, o).unwrap();
            let mut x = b.clone();
            lu.solve_in_place(&mut x).unwrap();
            for (x, e) in x.iter().zip(&expect) {
                assert!((x - e).abs() < 1e-13, "n={n}: {x} vs {e}");
            }
        }
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(
            TridiagonalLu::factor(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]),
            Err(SolveError::Pivot { row: 0 })
        ));
        let lu = TridiagonalLu::constant(4, 2.0, -1.0).unwrap();
        assert!(matches!(
            lu.solve_in_place(&mut [1.0; 3]),
            Err(SolveError::Dimension { .. })
        ));
        assert!(matches!(
            CyclicTridiagonalLu::constant(2, 2.0, -1.0),
            Err(SolveError::TooSmall { .. })
        ));
    }
}
