//! Harmonic Beltrami differentials on the unit disk.
//!
//! A tangent vector is `ν = ρ⁻¹ q̄` with `q` a holomorphic quadratic
//! differential. We store `q` through the coefficients `a_n` of
//!
//! ```text
//! q(z) = Σ_{n≥2} (n³ - n) a_n z^{n-2}
//! ```
//!
//! so that `ν(0) = (3/2) a₂`. The orthonormal basis element `ν_n` has a single
//! coefficient `a_n = √(2 / (π (n³ - n)))`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::Add;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_disk_radius, DiskPoint, QuadratureGrid};
use crate::optimize::{golden_section_max, sweep_and_polish};

/// `√(3 / 4π)`: the sharp ratio `‖ν‖_∞ / ‖ν‖_WP` on the disk, attained by `ν₂`.
pub const DISK_SUP_CONSTANT: f64 = 0.488_602_511_902_919_9;

const RADIAL_SWEEP: usize = 512;
const RADIUS_TOL: f64 = 1e-10;

pub(crate) fn cubic_weight(n: usize) -> f64 {
    let n = n as f64;
    (n - 1.0) * n * (n + 1.0)
}

/// `√(2 (n³ - n) / π)`, the coefficient of `z̄^{n-2}` in `ρ ν_n`.
pub fn basis_normalization(n: usize) -> f64 {
    (2.0 * cubic_weight(n) / PI).sqrt()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HarmonicBeltrami {
    coefficients: BTreeMap<usize, Complex64>,
}

impl HarmonicBeltrami {
    /// Builds `ν` from `(n, a_n)` pairs; repeated indices are summed.
    pub fn new<I>(coefficients: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (n, a) in coefficients {
            if n < 2 {
                return Err(Error::domain(format!(
                    "coefficient index must be at least 2, got {n}"
                )));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::domain(format!("non-finite coefficient a_{n}")));
            }
            *map.entry(n).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        Ok(HarmonicBeltrami { coefficients: map })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, Complex64> {
        &self.coefficients
    }

    pub fn coefficient(&self, n: usize) -> Complex64 {
        self.coefficients.get(&n).copied().unwrap_or_default()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.coefficients.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coefficients.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(|a| a.norm_sqr() == 0.0)
    }

    /// Taylor coefficients `b_j` of `q(z) = Σ b_j z^j`.
    pub fn taylor_coefficients(&self) -> Vec<Complex64> {
        let Some(top) = self.max_index() else {
            return Vec::new();
        };
        let mut b = vec![Complex64::new(0.0, 0.0); top - 1];
        for (&n, &a) in &self.coefficients {
            b[n - 2] = a * cubic_weight(n);
        }
        b
    }

    /// The holomorphic quadratic differential `q(z)`.
    pub fn quadratic_differential(&self, z: Complex64) -> Complex64 {
        horner(&self.taylor_coefficients(), z)
    }

    /// `ν(z) = ρ(z)⁻¹ conj(q(z))`.
    pub fn eval(&self, z: DiskPoint) -> Complex64 {
        let t = 1.0 - z.norm_sqr();
        self.quadratic_differential(z.to_complex()).conj() * (0.25 * t * t)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        HarmonicBeltrami {
            coefficients: self
                .coefficients
                .iter()
                .map(|(&n, &a)| (n, a * c))
                .collect(),
        }
    }

    /// `⟨self, other⟩ = ∬ ν_self conj(ν_other) ρ d²z` in closed form,
    /// `(π/2) Σ (n³ - n) conj(a_n) b_n`.
    pub fn wp_inner_closed_form(&self, other: &HarmonicBeltrami) -> Complex64 {
        let sum: Complex64 = self
            .coefficients
            .iter()
            .filter_map(|(n, a)| {
                other
                    .coefficients
                    .get(n)
                    .map(|b| a.conj() * b * cubic_weight(*n))
            })
            .sum();
        sum * (0.5 * PI)
    }

    pub fn wp_norm_sqr(&self) -> f64 {
        0.5 * PI
            * self
                .coefficients
                .iter()
                .map(|(&n, a)| cubic_weight(n) * a.norm_sqr())
                .sum::<f64>()
    }

    pub fn wp_norm(&self) -> f64 {
        self.wp_norm_sqr().sqrt()
    }
}

impl Add for &HarmonicBeltrami {
    type Output = HarmonicBeltrami;

    fn add(self, rhs: &HarmonicBeltrami) -> HarmonicBeltrami {
        let mut coefficients = self.coefficients.clone();
        for (&n, &a) in &rhs.coefficients {
            *coefficients.entry(n).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        HarmonicBeltrami { coefficients }
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// The orthonormal basis element `ν_n = ρ⁻¹ √(2(n³-n)/π) z̄^{n-2}`.
pub fn basis_element(n: usize) -> Result<HarmonicBeltrami> {
    if n < 2 {
        return Err(Error::domain(format!(
            "basis index must be at least 2, got {n}"
        )));
    }
    let a = basis_normalization(n) / cubic_weight(n);
    HarmonicBeltrami::new([(n, Complex64::new(a, 0.0))])
}

/// Weil–Petersson inner product `∬ ν_a conj(ν_b) ρ d²z` by quadrature on `grid`.
///
/// Fails with an accuracy error when the grid cannot integrate the product
/// exactly.
pub fn wp_inner(
    a: &HarmonicBeltrami,
    b: &HarmonicBeltrami,
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    let (Some(a_lo), Some(a_hi), Some(b_lo), Some(b_hi)) =
        (a.min_index(), a.max_index(), b.min_index(), b.max_index())
    else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let spread = a_hi.abs_diff(b_lo).max(b_hi.abs_diff(a_lo));
    if spread > 2 * grid.angular_order() {
        return Err(Error::accuracy(format!(
            "angular mode difference {spread} exceeds what angular_order {} resolves",
            grid.angular_order()
        )));
    }
    if a_hi.max(b_hi) >= 2 * grid.radial_count() {
        return Err(Error::accuracy(format!(
            "basis index {} exceeds what radial_count {} integrates exactly",
            a_hi.max(b_hi),
            grid.radial_count()
        )));
    }
    let qa = a.taylor_coefficients();
    let qb = b.taylor_coefficients();
    // ν_a conj(ν_b) ρ = ρ⁻¹ conj(q_a) q_b, with ρ⁻¹ = (1 - u²)² / 4
    let m = grid.angular_count();
    let angles: Vec<Complex64> = grid
        .angles()
        .map(|t| Complex64::from_polar(1.0, t))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &u) in grid.radial_nodes().iter().enumerate() {
        let t = grid.complements()[i];
        let ring: Complex64 = angles
            .iter()
            .map(|&e| {
                let z = e * u;
                horner(&qa, z).conj() * horner(&qb, z)
            })
            .sum();
        total += ring * (grid.radial_weights()[i] * 0.25 * t * t);
    }
    Ok(total * (2.0 * PI / m as f64))
}

/// `‖ν_n‖_∞ = √(2(n³-n)/π) · 4/(n+2)² · ((n-2)/(n+2))^{(n-2)/2}`.
pub fn sup_norm_exact(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!(
            "basis index must be at least 2, got {n}"
        )));
    }
    let nf = n as f64;
    let ratio = (nf - 2.0) / (nf + 2.0);
    Ok(basis_normalization(n) * 4.0 / ((nf + 2.0) * (nf + 2.0)) * ratio.powf(0.5 * (nf - 2.0)))
}

/// A located supremum `value = |F(radius · e^{i angle})|`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SupNorm {
    pub value: f64,
    pub radius: f64,
    pub angle: f64,
}

/// `sup_z |ν(z)|` by maximizing the angular maximum over a radial sweep.
pub fn sup_norm_numeric(v: &HarmonicBeltrami) -> SupNorm {
    let coeffs = v.taylor_coefficients();
    let nonzero: Vec<usize> = (0..coeffs.len())
        .filter(|&j| coeffs[j].norm_sqr() > 0.0)
        .collect();
    if nonzero.is_empty() {
        return SupNorm {
            value: 0.0,
            radius: 0.0,
            angle: 0.0,
        };
    }
    let monomial = (nonzero.len() == 1).then(|| (nonzero[0], coeffs[nonzero[0]].norm()));
    let angular_samples = (16 * coeffs.len()).max(64);

    let angular_max = |u: f64| -> (f64, f64) {
        if let Some((j, mag)) = monomial {
            return (mag * u.powi(j as i32), 0.0);
        }
        let modulus = |theta: f64| horner(&coeffs, Complex64::from_polar(u, theta)).norm();
        let h = 2.0 * PI / angular_samples as f64;
        let (best_k, _) = (0..angular_samples)
            .map(|k| (k, modulus(h * k as f64)))
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let centre = h * best_k as f64;
        let (theta, val) = golden_section_max(modulus, centre - h, centre + h, 1e-12);
        (val, theta.rem_euclid(2.0 * PI))
    };
    let profile = |u: f64| {
        let t = 1.0 - u * u;
        0.25 * t * t * angular_max(u).0
    };
    let (radius, value) = sweep_and_polish(profile, 0.0, 1.0, RADIAL_SWEEP, RADIUS_TOL);
    SupNorm {
        value,
        radius,
        angle: angular_max(radius).1,
    }
}

/// The injectivity-radius constant `C(r)` with `‖ν‖_∞ ≤ C(r) ‖ν‖_WP`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ThickPartConstant {
    pub r: f64,
    pub value: f64,
}

/// `1 - (4eʳ/(eʳ+1)²)³`, written as `tanh²(r/2)(1 + s + s²)` with
/// `s = sech²(r/2)` so small radii keep full relative precision.
fn disk_mass_fraction(r: f64) -> f64 {
    let c = (0.5 * r).cosh();
    let s = 1.0 / (c * c);
    let th = (0.5 * r).tanh();
    th * th * (1.0 + s + s * s)
}

/// `C(r) = {(4π/3)[1 - (4eʳ/(eʳ+1)²)³]}^{-1/2}`.
pub fn thick_part_constant(r: f64) -> Result<ThickPartConstant> {
    if !(r > 0.0) || r.is_infinite() {
        return Err(Error::domain(format!(
            "injectivity radius must be positive and finite, got {r}"
        )));
    }
    let value = (4.0 * PI / 3.0 * disk_mass_fraction(r)).sqrt().recip();
    Ok(ThickPartConstant { r, value })
}

/// The chain bounding `|ν(0)|` by the Weil–Petersson mass of `ν` inside the
/// hyperbolic disk `D(0, r)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CenterBoundChain {
    pub r: f64,
    pub euclidean_radius: f64,
    /// `‖ν‖²_WP` over the whole disk.
    pub wp_norm_sqr: f64,
    /// `∬_{D(0,r)} |q|² ρ⁻¹ d²z`, summed term by term in closed form.
    pub wp_sq_lower: f64,
    /// `(4π/3) |ν(0)|² [1 - (4eʳ/(eʳ+1)²)³]`.
    pub center_bound: f64,
    pub center_value: f64,
    pub constant: f64,
}

impl CenterBoundChain {
    /// Whether every inequality of the chain holds up to relative slack `rtol`.
    pub fn holds(&self, rtol: f64) -> bool {
        let slack = |x: f64| rtol * x.abs().max(f64::MIN_POSITIVE);
        self.wp_norm_sqr + slack(self.wp_norm_sqr) >= self.wp_sq_lower
            && self.wp_sq_lower + slack(self.wp_sq_lower) >= self.center_bound
            && self.center_value <= self.constant * self.wp_norm_sqr.sqrt() * (1.0 + rtol)
    }
}

pub fn center_bound_chain(v: &HarmonicBeltrami, r: f64) -> Result<CenterBoundChain> {
    let constant = thick_part_constant(r)?.value;
    let big_r = hyperbolic_disk_radius(r)?;
    let x = big_r * big_r;
    // ∫₀^R u^{2n-4} (1-u²)² u du = ½ X^{n-1} [1/(n-1) - 2X/n + X²/(n+1)]
    let wp_sq_lower = v
        .coefficients()
        .iter()
        .map(|(&n, a)| {
            let nf = n as f64;
            let radial =
                0.5 * x.powi(n as i32 - 1) * (1.0 / (nf - 1.0) - 2.0 * x / nf + x * x / (nf + 1.0));
            2.0 * PI * cubic_weight(n).powi(2) * a.norm_sqr() * 0.25 * radial
        })
        .sum();
    let center_value = v.eval(DiskPoint::ORIGIN).norm();
    Ok(CenterBoundChain {
        r,
        euclidean_radius: big_r,
        wp_norm_sqr: v.wp_norm_sqr(),
        wp_sq_lower,
        center_bound: 4.0 * PI / 3.0 * center_value * center_value * disk_mass_fraction(r),
        center_value,
        constant,
    })
}

/// Truncated reproducing kernel of the span of `ν₂ … ν_N`,
/// `P(z, w) = ρ(z) ρ(w) Σ conj(ν_n(z)) ν_n(w) = Σ c_n² (z w̄)^{n-2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionKernel {
    truncation: usize,
}

pub const DEFAULT_KERNEL_TRUNCATION: usize = 64;

impl ProjectionKernel {
    pub fn new(truncation: usize) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::domain(format!(
                "kernel truncation must be at least 2, got {truncation}"
            )));
        }
        Ok(ProjectionKernel { truncation })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn weights(&self) -> Vec<Complex64> {
        (2..=self.truncation)
            .map(|n| Complex64::new(2.0 * cubic_weight(n) / PI, 0.0))
            .collect()
    }

    pub fn eval(&self, z: DiskPoint, w: DiskPoint) -> Complex64 {
        horner(&self.weights(), z.to_complex() * w.to_complex().conj())
    }

    /// `Σ_{n≤N} |ν_n(z)|²` at `|z| = u`.
    pub fn diagonal_density(&self, u: f64) -> f64 {
        let x = u * u;
        let t = 1.0 - x;
        let series = (2..=self.truncation)
            .rev()
            .fold(0.0, |acc, n| acc * x + 2.0 * cubic_weight(n) / PI);
        t.powi(4) / 16.0 * series
    }

    /// `Λ_N = sup_z Σ_{n≤N} |ν_n(z)|²` and the radius attaining it.
    pub fn lambda_sup(&self) -> SupNorm {
        let (radius, value) = sweep_and_polish(
            |u| self.diagonal_density(u),
            0.0,
            1.0,
            RADIAL_SWEEP,
            RADIUS_TOL,
        );
        SupNorm {
            value,
            radius,
            angle: 0.0,
        }
    }

    /// `∬ |P(z, w)|² ρ(w)⁻¹ d²w` by quadrature over `w`; equals `P(z, z)` by
    /// the reproducing property.
    pub fn reproducing_integral(&self, z: DiskPoint, grid: &QuadratureGrid) -> Result<f64> {
        let top = self.truncation - 2;
        if top > 2 * grid.angular_order() {
            return Err(Error::accuracy(format!(
                "kernel truncation {} needs angular_order ≥ {}",
                self.truncation,
                top.div_ceil(2)
            )));
        }
        if self.truncation >= 2 * grid.radial_count() {
            return Err(Error::accuracy(format!(
                "kernel truncation {} exceeds what radial_count {} integrates exactly",
                self.truncation,
                grid.radial_count()
            )));
        }
        let weights = self.weights();
        let zc = z.to_complex();
        let angles: Vec<Complex64> = grid
            .angles()
            .map(|t| Complex64::from_polar(1.0, t))
            .collect();
        let mut total = 0.0;
        for (i, &u) in grid.radial_nodes().iter().enumerate() {
            let t = grid.complements()[i];
            let ring: f64 = angles
                .iter()
                .map(|&e| horner(&weights, zc * (e * u).conj()).norm_sqr())
                .sum();
            total += ring * grid.radial_weights()[i] * 0.25 * t * t;
        }
        Ok(total * 2.0 * PI / grid.angular_count() as f64)
    }
}
