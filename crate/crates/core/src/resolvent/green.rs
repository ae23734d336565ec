//! `G` through its mode-`k` Green's function.
//!
//! With `a = k + 1`, `b = 1 - k` the regular solution of the homogeneous radial
//! equation is `p₁(x) = (a + b x) / (1 - x)` and
//!
//! ```text
//! G_k(x, y) = p₁(x_<) p₁(x_>) J(x_>) / x_>^k,
//! J(y) = ∫_y^1 (y/s)^k (1 - s)² / (s (a + b s)²) ds.
//! ```
//!
//! This is the angular Fourier coefficient of the point-pair kernel
//! `(1/π) Q₁(cosh d(z, w))` against `ρ(w) d²w`, where `Q₁` is the Legendre
//! function of the second kind. The reduced output is
//!
//! ```text
//! p(x) = p₁(x) [ J(x) ∫₀^x (y/x)^k F(y) dy + ∫_x^1 J(y) F(y) dy ],
//! F(y) = 2 p₁(y) φ(y) / (1 - y)².
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::QuadratureGrid;

struct ModeGreen {
    k: i32,
    a: f64,
    b: f64,
}

const INNER_TARGET: f64 = 1e-15;

impl ModeGreen {
    fn new(k: usize) -> Self {
        ModeGreen {
            k: k as i32,
            a: k as f64 + 1.0,
            b: 1.0 - k as f64,
        }
    }

    fn regular(&self, y: f64) -> f64 {
        (self.a + self.b * y) / (1.0 - y)
    }

    /// `J(y)` for `y ≤ ½`, by `s = y e^τ`.
    fn tail_near_origin(&self, y: f64) -> f64 {
        let (a, b, k) = (self.a, self.b, self.k);
        let integrand = |tau: f64| {
            let s = y * tau.exp();
            let d = a + b * s;
            (-(k as f64) * tau).exp() * (1.0 - s) * (1.0 - s) / (d * d)
        };
        quadrature::integrate(integrand, 0.0, -y.ln(), INNER_TARGET).integral
    }

    /// `J(y) / (1 - y)³` for `y > ½`, by `s = 1 - (1 - y) σ`.
    fn scaled_tail_near_boundary(&self, y: f64) -> f64 {
        let (a, b, k) = (self.a, self.b, self.k);
        let c = 1.0 - y;
        let integrand = |sigma: f64| {
            let s = 1.0 - c * sigma;
            let d = a + b * s;
            sigma * sigma * (y / s).powi(k) / (s * d * d)
        };
        quadrature::integrate(integrand, 0.0, 1.0, INNER_TARGET).integral
    }

    fn tail(&self, y: f64) -> f64 {
        if y <= 0.5 {
            self.tail_near_origin(y)
        } else {
            self.scaled_tail_near_boundary(y) * (1.0 - y).powi(3)
        }
    }

    /// `J(y) F(y) / φ(y)`, written to stay finite as `y → 1`.
    fn tail_times_source_weight(&self, y: f64) -> f64 {
        if y <= 0.5 {
            let c = 1.0 - y;
            self.tail_near_origin(y) * 2.0 * self.regular(y) / (c * c)
        } else {
            self.scaled_tail_near_boundary(y) * 2.0 * (self.a + self.b * y)
        }
    }
}

/// Angular Fourier coefficient `K_k(u, v)` of the kernel of `G`, so that mode
/// `k` of `G f` at radius `u` is `∫₀¹ K_k(u, v) f_k(v) ρ(v) v dv`.
pub fn mode_kernel(k: usize, u: f64, v: f64) -> Result<f64> {
    for r in [u, v] {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::domain(format!("radius {r} must lie in [0, 1)")));
        }
    }
    if u == v && k == 0 && u == 0.0 {
        return Ok(f64::INFINITY);
    }
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    if lo == 0.0 {
        return Ok(if k == 0 {
            let m = ModeGreen::new(0);
            m.regular(0.0) * m.regular(hi * hi) * m.tail(hi * hi)
        } else {
            0.0
        });
    }
    let m = ModeGreen::new(k);
    let (x, y) = (lo * lo, hi * hi);
    Ok((lo / hi).powi(k as i32) * m.regular(x) * m.regular(y) * m.tail(y))
}

fn interpolate(grid: &QuadratureGrid, values: &[Complex64], x: f64) -> Complex64 {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for ((&xj, &lj), &vj) in grid
        .squared_nodes()
        .iter()
        .zip(grid.barycentric_weights())
        .zip(values)
    {
        let d = x - xj;
        if d == 0.0 {
            return vj;
        }
        let c = lj / d;
        num += vj * c;
        den += c;
    }
    num / den
}

fn integrate_complex<F>(f: F, a: f64, b: f64, target: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let re = quadrature::integrate(|y| f(y).re, a, b, target).integral;
    let im = quadrature::integrate(|y| f(y).im, a, b, target).integral;
    Complex64::new(re, im)
}

/// Reduced profile of `G f` at the grid's nodes from the reduced profile `φ`
/// of mode `±k` of `f`.
pub(crate) fn apply(
    grid: &QuadratureGrid,
    k: usize,
    phi: &[Complex64],
    tolerance: f64,
) -> Result<Vec<Complex64>> {
    let green = ModeGreen::new(k);
    let x = grid.squared_nodes();
    let n = x.len();
    let scale = phi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let target = 1e-4 * tolerance * scale;
    let phi_at = |y: f64| interpolate(grid, phi, y);
    let source = |y: f64| {
        let c = 1.0 - y;
        phi_at(y) * (2.0 * green.regular(y) / (c * c))
    };

    let mut inner = vec![Complex64::new(0.0, 0.0); n];
    let mut prev = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let xi = x[i];
        if i > 0 {
            acc *= (prev / xi).powi(k as i32);
        }
        let weight = 1.0 / ((1.0 - xi) * (1.0 - xi));
        acc += integrate_complex(
            |y| source(y) * (y / xi).powi(k as i32),
            prev,
            xi,
            target * weight,
        );
        inner[i] = acc;
        prev = xi;
    }

    let mut outer = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut next = 1.0;
    for i in (0..n).rev() {
        acc += integrate_complex(
            |y| phi_at(y) * green.tail_times_source_weight(y),
            x[i],
            next,
            target,
        );
        outer[i] = acc;
        next = x[i];
    }

    let out: Vec<Complex64> = (0..n)
        .map(|i| (inner[i] * green.tail(x[i]) + outer[i]) * green.regular(x[i]))
        .collect();
    if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numerical {
            message: format!("kernel quadrature for mode {k} produced non-finite values"),
            residual: f64::INFINITY,
        });
    }
    Ok(out)
}
