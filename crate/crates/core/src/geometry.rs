//! Hyperbolic geometry of the unit disk and polar quadrature for integrals
//! of the form `∬ f ρ d²z`.
//!
//! The disk carries the complete metric `ρ(z)|dz|²` of curvature `-1` with
//! `ρ(z) = 4 / (1 - |z|²)²`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::domain(format!("non-finite disk point ({re}, {im})")));
        }
        if re * re + im * im >= 1.0 {
            return Err(Error::domain(format!(
                "point ({re}, {im}) does not satisfy |z| < 1"
            )));
        }
        Ok(DiskPoint { re, im })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// The point `radius · e^{i angle}`.
    pub fn polar(radius: f64, angle: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&radius) {
            return Err(Error::domain(format!("radius {radius} must lie in [0, 1)")));
        }
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    /// Caller guarantees `|z| < 1`.
    pub(crate) fn unchecked(z: Complex64) -> Self {
        DiskPoint { re: z.re, im: z.im }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Hyperbolic metric density `ρ(z) = 4 / (1 - |z|²)²`.
pub fn rho(z: DiskPoint) -> f64 {
    let t = 1.0 - z.norm_sqr();
    4.0 / (t * t)
}

/// Euclidean radius of the hyperbolic disk `D(0, r)`: `(eʳ - 1) / (eʳ + 1)`.
pub fn hyperbolic_disk_radius(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!(
            "hyperbolic radius must be non-negative, got {r}"
        )));
    }
    // tanh(r/2) is the same quantity without overflow for large r.
    Ok((0.5 * r).tanh())
}

/// Inverse of [`hyperbolic_disk_radius`]: `log((1 + R) / (1 - R))`.
pub fn hyperbolic_radius(euclidean_radius: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&euclidean_radius) {
        return Err(Error::domain(format!(
            "Euclidean radius must lie in [0, 1), got {euclidean_radius}"
        )));
    }
    Ok(2.0 * euclidean_radius.atanh())
}

/// Hyperbolic area of `D(0, r)`, `4π sinh²(r/2)`.
pub fn hyperbolic_area(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!(
            "hyperbolic radius must be non-negative, got {r}"
        )));
    }
    let s = (0.5 * r).sinh();
    Ok(4.0 * PI * s * s)
}

/// Holomorphic automorphism of the disk sending the origin to `center`:
///
/// `w ↦ (e^{iθ} w + a) / (1 + ā e^{iθ} w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskAutomorphism {
    pub center: DiskPoint,
    pub rotation: f64,
}

impl DiskAutomorphism {
    pub fn new(center: DiskPoint, rotation: f64) -> Self {
        DiskAutomorphism { center, rotation }
    }

    pub fn identity() -> Self {
        DiskAutomorphism {
            center: DiskPoint::ORIGIN,
            rotation: 0.0,
        }
    }

    pub fn apply(&self, w: DiskPoint) -> DiskPoint {
        let a = self.center.to_complex();
        let zeta = Complex64::from_polar(1.0, self.rotation) * w.to_complex();
        DiskPoint::unchecked((zeta + a) / (Complex64::new(1.0, 0.0) + a.conj() * zeta))
    }

    /// Complex derivative at `w`.
    pub fn derivative(&self, w: DiskPoint) -> Complex64 {
        let a = self.center.to_complex();
        let rot = Complex64::from_polar(1.0, self.rotation);
        let denom = Complex64::new(1.0, 0.0) + a.conj() * rot * w.to_complex();
        rot * (1.0 - a.norm_sqr()) / (denom * denom)
    }

    pub fn inverse(&self) -> Self {
        let rot_inv = Complex64::from_polar(1.0, -self.rotation);
        DiskAutomorphism {
            center: DiskPoint::unchecked(-rot_inv * self.center.to_complex()),
            rotation: -self.rotation,
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes increasing.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * x * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Which area element the grid's integration routines apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaWeighting {
    /// `d²z`
    Euclidean,
    /// `ρ d²z`
    Hyperbolic,
}

/// Polar tensor-product quadrature on a disk `|z| < R` (by default `R = 1`).
///
/// Radially the rule is Gauss–Legendre in the squared radius `x = u²`, so
/// `∫₀^R g(u) u du = ½ ∫₀^{R²} g(√x) dx` is exact whenever `g(√x)` is a
/// polynomial of degree `< 2 · radial_count`. Every mode-decomposed integrand in
/// this crate has the form `u^{2j} · (1 - u²)^p` after the `ρ` powers are merged,
/// so it is integrated exactly up to that degree. Angularly the rule samples
/// `2 · angular_order + 1` equispaced angles and integrates Fourier modes
/// `e^{imθ}` exactly for `|m| ≤ 2 · angular_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
    squared_nodes: Vec<f64>,
    complements: Vec<f64>,
    barycentric: Vec<f64>,
    angular_order: usize,
    area_weighting: AreaWeighting,
    outer_radius: f64,
}

pub const MIN_RADIAL_COUNT: usize = 4;
pub const DEFAULT_RADIAL_COUNT: usize = 128;
pub const DEFAULT_ANGULAR_ORDER: usize = 64;

/// Build the default full-disk grid with hyperbolic area weighting.
pub fn build_grid(radial_count: usize, angular_order: usize) -> Result<QuadratureGrid> {
    QuadratureGrid::new(radial_count, angular_order, 1.0, AreaWeighting::Hyperbolic)
}

impl QuadratureGrid {
    pub fn new(
        radial_count: usize,
        angular_order: usize,
        outer_radius: f64,
        area_weighting: AreaWeighting,
    ) -> Result<Self> {
        if radial_count < MIN_RADIAL_COUNT {
            return Err(Error::config(format!(
                "radial_count must be at least {MIN_RADIAL_COUNT}, got {radial_count}"
            )));
        }
        if !(outer_radius > 0.0 && outer_radius <= 1.0) {
            return Err(Error::config(format!(
                "outer radius must lie in (0, 1], got {outer_radius}"
            )));
        }
        let (xi, w) = gauss_legendre(radial_count);
        let r2 = outer_radius * outer_radius;
        let squared_nodes: Vec<f64> = xi.iter().map(|&s| 0.5 * r2 * (s + 1.0)).collect();
        let complements = if outer_radius == 1.0 {
            xi.iter().map(|&s| 0.5 * (1.0 - s)).collect()
        } else {
            squared_nodes.iter().map(|&x| 1.0 - x).collect()
        };
        let radial_nodes = squared_nodes.iter().map(|x| x.sqrt()).collect();
        let radial_weights = w.iter().map(|&wi| 0.25 * r2 * wi).collect();
        let barycentric = xi
            .iter()
            .zip(&w)
            .enumerate()
            .map(|(j, (&s, &wj))| {
                let mag = ((1.0 - s * s) * wj).sqrt();
                if j % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        Ok(QuadratureGrid {
            radial_nodes,
            radial_weights,
            squared_nodes,
            complements,
            barycentric,
            angular_order,
            area_weighting,
            outer_radius,
        })
    }

    /// Grid restricted to the hyperbolic disk `D(0, r)`.
    pub fn hyperbolic_subdisk(
        radial_count: usize,
        angular_order: usize,
        hyperbolic_radius: f64,
    ) -> Result<Self> {
        if !(hyperbolic_radius > 0.0) {
            return Err(Error::domain(format!(
                "hyperbolic radius must be positive, got {hyperbolic_radius}"
            )));
        }
        let outer = hyperbolic_disk_radius(hyperbolic_radius)?;
        if outer >= 1.0 {
            return Err(Error::accuracy(format!(
                "hyperbolic radius {hyperbolic_radius} is indistinguishable from the full disk in f64"
            )));
        }
        Self::new(
            radial_count,
            angular_order,
            outer,
            AreaWeighting::Hyperbolic,
        )
    }

    pub fn with_weighting(mut self, weighting: AreaWeighting) -> Self {
        self.area_weighting = weighting;
        self
    }

    /// The same grid with half the radial nodes, used for error estimates.
    pub fn coarsened(&self) -> Self {
        let n = (self.radial_count() / 2).max(MIN_RADIAL_COUNT);
        Self::new(
            n,
            self.angular_order,
            self.outer_radius,
            self.area_weighting,
        )
        .expect("coarsened grid parameters are valid")
    }

    pub fn radial_count(&self) -> usize {
        self.radial_nodes.len()
    }

    pub fn angular_order(&self) -> usize {
        self.angular_order
    }

    pub fn angular_count(&self) -> usize {
        2 * self.angular_order + 1
    }

    pub fn area_weighting(&self) -> AreaWeighting {
        self.area_weighting
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    /// Radii `u_i`, strictly increasing in `(0, R)`.
    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }

    /// Weights `W_i` with `∫₀^R g(u) u du ≈ Σ W_i g(u_i)`.
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    /// `x_i = u_i²`.
    pub fn squared_nodes(&self) -> &[f64] {
        &self.squared_nodes
    }

    /// `1 - u_i²`, computed without cancellation on the full disk.
    pub fn complements(&self) -> &[f64] {
        &self.complements
    }

    pub(crate) fn barycentric_weights(&self) -> &[f64] {
        &self.barycentric
    }

    /// `ρ(u_i)`.
    pub fn density(&self, i: usize) -> f64 {
        let t = self.complements[i];
        4.0 / (t * t)
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.angular_count();
        (0..m).map(move |j| 2.0 * PI * j as f64 / m as f64)
    }

    /// Radial weight including `ρ` when the grid is hyperbolically weighted.
    pub fn node_weight(&self, i: usize) -> f64 {
        match self.area_weighting {
            AreaWeighting::Euclidean => self.radial_weights[i],
            AreaWeighting::Hyperbolic => self.radial_weights[i] * self.density(i),
        }
    }

    /// `∬ f dA` over the grid's disk with its area weighting.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(DiskPoint) -> Complex64,
    {
        let m = self.angular_count();
        let dtheta = 2.0 * PI / m as f64;
        let angles: Vec<(f64, f64)> = self.angles().map(|a| (a.cos(), a.sin())).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (i, &u) in self.radial_nodes.iter().enumerate() {
            let ring: Complex64 = angles
                .iter()
                .map(|&(c, s)| f(DiskPoint::unchecked(Complex64::new(u * c, u * s))))
                .sum();
            total += ring * self.node_weight(i);
        }
        total * dtheta
    }

    /// `∬ g(|z|) dA` for a rotationally symmetric integrand.
    pub fn integrate_radial<F>(&self, g: F) -> f64
    where
        F: Fn(f64) -> f64,
    {
        let sum: f64 = self
            .radial_nodes
            .iter()
            .enumerate()
            .map(|(i, &u)| self.node_weight(i) * g(u))
            .sum();
        2.0 * PI * sum
    }

    /// `(1/2π) ∫ e^{imθ} dθ` evaluated with the angular rule; `1` for `m = 0`
    /// and round-off for resolvable `m ≠ 0`.
    pub fn angular_mean(&self, mode: i64) -> Complex64 {
        let m = self.angular_count();
        let sum: Complex64 = (0..m)
            .map(|j| {
                let phase = 2.0 * PI * ((mode * j as i64).rem_euclid(m as i64)) as f64 / m as f64;
                Complex64::from_polar(1.0, phase)
            })
            .sum();
        sum / m as f64
    }

    /// Barycentric interpolation in `x = u²` of samples given on the nodes.
    pub fn interpolate_squared(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &lj), &vj) in self.squared_nodes.iter().zip(&self.barycentric).zip(values) {
            let d = x - xj;
            if d == 0.0 {
                return vj;
            }
            let c = lj / d;
            num += c * vj;
            den += c;
        }
        num / den
    }
}
