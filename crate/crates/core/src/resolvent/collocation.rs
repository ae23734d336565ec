//! Spectral collocation of the radial resolvent equation in `x = u²`.
//!
//! The unknown is the degree `< n` polynomial interpolating `p` at the grid's
//! Gauss–Legendre nodes. Every row is an interior collocation equation; the
//! double zero of the derivative coefficients at `x = 1` and the regular
//! singular point at `x = 0` select the bounded, regular solution without
//! extra boundary rows.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::QuadratureGrid;

/// First and second barycentric differentiation matrices on the nodes `x_i`.
#[derive(Debug, Clone)]
pub(crate) struct DifferentiationMatrices {
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
}

impl DifferentiationMatrices {
    pub fn new(grid: &QuadratureGrid) -> Self {
        let x = grid.squared_nodes();
        let w = grid.barycentric_weights();
        let n = x.len();
        let mut d1 = DMatrix::zeros(n, n);
        let mut d2 = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d1[(i, j)] = (w[j] / w[i]) / (x[i] - x[j]);
                }
            }
            let s: f64 = (0..n).filter(|&j| j != i).map(|j| d1[(i, j)]).sum();
            d1[(i, i)] = -s;
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d2[(i, j)] = 2.0 * d1[(i, j)] * (d1[(i, i)] - 1.0 / (x[i] - x[j]));
                }
            }
            let s: f64 = (0..n).filter(|&j| j != i).map(|j| d2[(i, j)]).sum();
            d2[(i, i)] = -s;
        }
        DifferentiationMatrices { d1, d2 }
    }

    /// The real collocation matrix of `2(Δ + ½)` on mode `±k`.
    pub fn operator(&self, grid: &QuadratureGrid, k: usize) -> DMatrix<f64> {
        let x = grid.squared_nodes();
        let t = grid.complements();
        let n = x.len();
        let kp1 = (k + 1) as f64;
        DMatrix::from_fn(n, n, |i, j| {
            let identity = if i == j { 1.0 } else { 0.0 };
            identity - 0.5 * t[i] * t[i] * (x[i] * self.d2[(i, j)] + kp1 * self.d1[(i, j)])
        })
    }

    pub fn forward(&self, grid: &QuadratureGrid, k: usize, p: &[Complex64]) -> Vec<Complex64> {
        let a = self.operator(grid, k);
        let (re, im) = split(p);
        join(&(&a * re), &(&a * im))
    }
}

fn split(v: &[Complex64]) -> (DVector<f64>, DVector<f64>) {
    (
        DVector::from_iterator(v.len(), v.iter().map(|c| c.re)),
        DVector::from_iterator(v.len(), v.iter().map(|c| c.im)),
    )
}

fn join(re: &DVector<f64>, im: &DVector<f64>) -> Vec<Complex64> {
    re.iter()
        .zip(im.iter())
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect()
}

/// A factored collocation system for one `|k|`.
#[derive(Debug)]
pub(crate) struct ModeSystem {
    matrix: DMatrix<f64>,
    lu: LU<f64, Dyn, Dyn>,
    norm_inf: f64,
}

impl ModeSystem {
    pub fn new(grid: &QuadratureGrid, d: &DifferentiationMatrices, k: usize) -> Result<Self> {
        let matrix = d.operator(grid, k);
        let norm_inf = matrix
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let lu = matrix.clone().lu();
        if !lu.is_invertible() {
            return Err(Error::Numerical {
                message: format!("collocation matrix for mode {k} is singular"),
                residual: f64::INFINITY,
            });
        }
        Ok(ModeSystem {
            matrix,
            lu,
            norm_inf,
        })
    }

    /// Solves `A p = f` and checks the normwise backward error against `tol`.
    pub fn solve(&self, f: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
        let (fr, fi) = split(f);
        let solve = |b: &DVector<f64>| -> Result<DVector<f64>> {
            let sol = self.lu.solve(b).ok_or_else(|| Error::Numerical {
                message: "collocation solve failed".into(),
                residual: f64::INFINITY,
            })?;
            let residual = (&self.matrix * &sol - b).amax();
            let scale = self.norm_inf * sol.amax() + b.amax();
            let backward = if scale > 0.0 { residual / scale } else { 0.0 };
            if !(backward <= tol) {
                return Err(Error::Numerical {
                    message: "collocation residual above solver tolerance".into(),
                    residual: backward,
                });
            }
            Ok(sol)
        };
        Ok(join(&solve(&fr)?, &solve(&fi)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_grid;

    #[test]
    fn differentiates_polynomials_exactly() {
        let grid = build_grid(12, 0).unwrap();
        let d = DifferentiationMatrices::new(&grid);
        let x = grid.squared_nodes();
        let p = DVector::from_iterator(12, x.iter().map(|&x| x.powi(5) - 2.0 * x * x + 3.0));
        let dp = &d.d1 * &p;
        let ddp = &d.d2 * &p;
        for (i, &xi) in x.iter().enumerate() {
            assert!((dp[i] - (5.0 * xi.powi(4) - 4.0 * xi)).abs() < 1e-11);
            assert!((ddp[i] - (20.0 * xi.powi(3) - 4.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn manufactured_t_squared() {
        // A t² = (1 - 0) t² + (2(2+k)/2) t³
        let grid = build_grid(48, 0).unwrap();
        let d = DifferentiationMatrices::new(&grid);
        for k in [0usize, 3, 10] {
            let system = ModeSystem::new(&grid, &d, k).unwrap();
            let t = grid.complements();
            let f: Vec<Complex64> = t
                .iter()
                .map(|&t| Complex64::new((2.0 + k as f64) * t.powi(3), 0.0))
                .collect();
            let p = system.solve(&f, 1e-10).unwrap();
            for (i, &ti) in t.iter().enumerate() {
                assert!((p[i].re - ti * ti).abs() < 1e-12, "k={k} i={i}");
                assert_eq!(p[i].im, 0.0);
            }
        }
    }
}
