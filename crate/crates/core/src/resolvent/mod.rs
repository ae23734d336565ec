//! The operator `G = ½(Δ + ½)⁻¹` on the disk, with `Δ = -ρ⁻¹∂∂̄`.
//!
//! Functions are stored mode by mode. Mode `k` of `f` is written
//! `u^{|k|} p(u²) e^{ikθ}` and only the reduced part `p`, sampled at the grid's
//! squared radial nodes, is kept. `G` commutes with rotations, so it acts on
//! each mode separately through the radial operator
//!
//! ```text
//! 2(Δ + ½) : p ↦ p - ((1 - x)²/2) (x p'' + (|k| + 1) p'),   x = u²
//! ```
//!
//! whose coefficients vanish to second order at `x = 1`, so bounded solutions
//! need no boundary condition there.

mod cache;
mod collocation;
mod green;
mod properties;

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::QuadratureGrid;

pub use cache::{CacheKey, ResolventCache};
pub use green::mode_kernel;
pub use properties::{
    manufactured_cases, resolvent_selftest, structural_checks, CheckResult, ManufacturedCase,
    SelfTestReport, StructuralReport, StructuralTolerances,
};

use collocation::{DifferentiationMatrices, ModeSystem};

/// The point `λ = -½` at which the resolvent of `Δ` is taken.
pub const SPECTRAL_POINT: f64 = -0.5;
pub const DEFAULT_SOLVER_TOLERANCE: f64 = 1e-10;

/// One angular mode, `u^{|mode|} p(u²) e^{i·mode·θ}`, with `values[i] = p(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub mode: i64,
    pub values: Vec<Complex64>,
}

impl RadialProfile {
    pub fn new(mode: i64, values: Vec<Complex64>) -> Self {
        RadialProfile { mode, values }
    }

    /// Samples the reduced part `p` from a function of `x = u²`.
    pub fn from_reduced<F>(grid: &QuadratureGrid, mode: i64, p: F) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        RadialProfile {
            mode,
            values: grid.squared_nodes().iter().map(|&x| p(x)).collect(),
        }
    }

    pub fn zeros(grid: &QuadratureGrid, mode: i64) -> Self {
        RadialProfile {
            mode,
            values: vec![Complex64::new(0.0, 0.0); grid.radial_count()],
        }
    }

    pub fn abs_mode(&self) -> usize {
        self.mode.unsigned_abs() as usize
    }

    /// `u_i^{|k|} p(x_i)`.
    pub fn radial_value(&self, grid: &QuadratureGrid, i: usize) -> Complex64 {
        self.values[i] * grid.radial_nodes()[i].powi(self.abs_mode() as i32)
    }

    /// Radial part extrapolated to `u = 0`; zero for every nonzero mode.
    pub fn value_at_origin(&self, grid: &QuadratureGrid) -> Complex64 {
        if self.mode != 0 {
            return Complex64::new(0.0, 0.0);
        }
        let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
        Complex64::new(
            grid.interpolate_squared(&re, 0.0),
            grid.interpolate_squared(&im, 0.0),
        )
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn scaled(&self, c: Complex64) -> Self {
        RadialProfile {
            mode: self.mode,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// A function on the disk as a finite sum of angular modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridFunction {
    modes: BTreeMap<i64, RadialProfile>,
}

impl GridFunction {
    /// Modes with equal index are summed.
    pub fn from_modes<I>(profiles: I) -> Self
    where
        I: IntoIterator<Item = RadialProfile>,
    {
        let mut modes: BTreeMap<i64, RadialProfile> = BTreeMap::new();
        for p in profiles {
            match modes.get_mut(&p.mode) {
                Some(existing) => {
                    for (a, b) in existing.values.iter_mut().zip(&p.values) {
                        *a += b;
                    }
                }
                None => {
                    modes.insert(p.mode, p);
                }
            }
        }
        GridFunction { modes }
    }

    pub fn constant(grid: &QuadratureGrid, c: f64) -> Self {
        Self::from_modes([RadialProfile::from_reduced(grid, 0, |_| {
            Complex64::new(c, 0.0)
        })])
    }

    pub fn modes(&self) -> impl Iterator<Item = &RadialProfile> {
        self.modes.values()
    }

    pub fn mode(&self, k: i64) -> Option<&RadialProfile> {
        self.modes.get(&k)
    }

    pub fn max_abs_mode(&self) -> usize {
        self.modes
            .keys()
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        GridFunction {
            modes: self.modes.iter().map(|(&k, p)| (k, p.scaled(c))).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        GridFunction {
            modes: self
                .modes
                .values()
                .map(|p| {
                    (
                        -p.mode,
                        RadialProfile::new(-p.mode, p.values.iter().map(|v| v.conj()).collect()),
                    )
                })
                .collect(),
        }
    }

    /// Pointwise product, formed exactly by convolving modes:
    /// `u^{|j|} p · u^{|l|} q = u^{|j+l|} x^{(|j|+|l|-|j+l|)/2} p q`.
    pub fn mul(&self, other: &GridFunction, grid: &QuadratureGrid) -> GridFunction {
        let x = grid.squared_nodes();
        let mut out: BTreeMap<i64, RadialProfile> = BTreeMap::new();
        for (&j, p) in &self.modes {
            for (&l, q) in &other.modes {
                let k = j + l;
                let lift = ((j.abs() + l.abs() - k.abs()) / 2) as i32;
                let entry = out
                    .entry(k)
                    .or_insert_with(|| RadialProfile::zeros(grid, k));
                for (i, slot) in entry.values.iter_mut().enumerate() {
                    *slot += p.values[i] * q.values[i] * x[i].powi(lift);
                }
            }
        }
        GridFunction { modes: out }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        Self::from_modes(self.modes.values().chain(other.modes.values()).cloned())
    }

    /// Value at grid node `(u_i, θ_j)`.
    pub fn value_at_node(&self, grid: &QuadratureGrid, i: usize, theta: f64) -> Complex64 {
        self.modes
            .values()
            .map(|p| p.radial_value(grid, i) * Complex64::from_polar(1.0, p.mode as f64 * theta))
            .sum()
    }

    /// All node values, indexed `[radial][angular]`.
    pub fn values_at_nodes(&self, grid: &QuadratureGrid) -> Vec<Vec<Complex64>> {
        let angles: Vec<f64> = grid.angles().collect();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); angles.len()]; grid.radial_count()];
        for p in self.modes.values() {
            let phases: Vec<Complex64> = angles
                .iter()
                .map(|&t| Complex64::from_polar(1.0, p.mode as f64 * t))
                .collect();
            for (i, row) in out.iter_mut().enumerate() {
                let r = p.radial_value(grid, i);
                for (slot, phase) in row.iter_mut().zip(&phases) {
                    *slot += r * phase;
                }
            }
        }
        out
    }

    /// `∬ f ρ d²z`.
    pub fn integrate_hyperbolic(&self, grid: &QuadratureGrid) -> Complex64 {
        let Some(p) = self.modes.get(&0) else {
            return Complex64::new(0.0, 0.0);
        };
        let sum: Complex64 = (0..grid.radial_count())
            .map(|i| p.values[i] * (grid.radial_weights()[i] * grid.density(i)))
            .sum();
        sum * (2.0 * PI)
    }

    /// The bilinear pairing `∬ f g ρ d²z` (no conjugation).
    pub fn pairing(&self, other: &GridFunction, grid: &QuadratureGrid) -> Complex64 {
        let x = grid.squared_nodes();
        let mut total = Complex64::new(0.0, 0.0);
        for (&k, p) in &self.modes {
            let Some(q) = other.modes.get(&-k) else {
                continue;
            };
            let power = k.unsigned_abs() as i32;
            for (i, &xi) in x.iter().enumerate() {
                total += p.values[i]
                    * q.values[i]
                    * (xi.powi(power) * grid.radial_weights()[i] * grid.density(i));
            }
        }
        total * (2.0 * PI)
    }

    /// Whether mode `-k` is the conjugate of mode `k` up to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.modes.iter().all(|(&k, p)| match self.modes.get(&-k) {
            Some(q) => p
                .values
                .iter()
                .zip(&q.values)
                .all(|(a, b)| (a - b.conj()).norm() <= tol),
            None => p.sup_norm() <= tol,
        })
    }

    /// Largest nodal difference in the reduced profiles, over all modes.
    pub fn max_profile_difference(&self, other: &GridFunction) -> f64 {
        let keys: std::collections::BTreeSet<i64> = self
            .modes
            .keys()
            .chain(other.modes.keys())
            .copied()
            .collect();
        keys.into_iter()
            .map(|k| match (self.modes.get(&k), other.modes.get(&k)) {
                (Some(a), Some(b)) => a
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max),
                (Some(a), None) | (None, Some(a)) => a.sup_norm(),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// A random real function `(1 - u²)³ Σ_{|k|≤max_mode} u^{|k|} P_k(u²) e^{ikθ}`
    /// with `deg P_k ≤ degree`, coefficients uniform in the unit square and
    /// `P_{-k} = conj(P_k)`.
    pub fn random_band_limited<R: Rng + ?Sized>(
        grid: &QuadratureGrid,
        rng: &mut R,
        max_mode: usize,
        degree: usize,
    ) -> Self {
        let mut profiles = Vec::with_capacity(2 * max_mode + 1);
        for k in 0..=max_mode as i64 {
            let coeffs: Vec<Complex64> = (0..=degree)
                .map(|_| {
                    let re = rng.random_range(-1.0..1.0);
                    let im = if k == 0 {
                        0.0
                    } else {
                        rng.random_range(-1.0..1.0)
                    };
                    Complex64::new(re, im)
                })
                .collect();
            let poly = |x: f64| {
                coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
            };
            let reduced = |x: f64| poly(x) * (1.0 - x).powi(3);
            let p = RadialProfile::from_reduced(grid, k, reduced);
            if k != 0 {
                profiles.push(RadialProfile::new(
                    -k,
                    p.values.iter().map(|v| v.conj()).collect(),
                ));
            }
            profiles.push(p);
        }
        Self::from_modes(profiles)
    }
}

/// How `G` is applied to a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Spectral collocation of the radial equation on the grid's nodes.
    ModeBvp,
    /// Quadrature against the mode-`k` Green's function.
    KernelConvolution,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::ModeBvp => "mode_bvp",
            Backend::KernelConvolution => "kernel_convolution",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mode_bvp" => Ok(Backend::ModeBvp),
            "kernel_convolution" => Ok(Backend::KernelConvolution),
            other => Err(Error::config(format!(
                "unknown backend {other:?}; expected mode_bvp or kernel_convolution"
            ))),
        }
    }
}

/// Applies `G` on a fixed full-disk grid.
///
/// Operators are `Sync`; concurrent calls share the factorization cache and
/// the result memo.
#[derive(Debug)]
pub struct ResolventOperator {
    grid: QuadratureGrid,
    backend: Backend,
    tolerance: f64,
    matrices: OnceLock<DifferentiationMatrices>,
    systems: RwLock<HashMap<usize, Arc<ModeSystem>>>,
    cache: Arc<ResolventCache>,
}

impl ResolventOperator {
    pub fn new(grid: QuadratureGrid, backend: Backend) -> Result<Self> {
        Self::with_tolerance(grid, backend, DEFAULT_SOLVER_TOLERANCE)
    }

    pub fn with_tolerance(grid: QuadratureGrid, backend: Backend, tolerance: f64) -> Result<Self> {
        if grid.outer_radius() != 1.0 {
            return Err(Error::config(
                "the resolvent needs a grid covering the whole disk",
            ));
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::config(format!(
                "solver tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(ResolventOperator {
            grid,
            backend,
            tolerance,
            matrices: OnceLock::new(),
            systems: RwLock::new(HashMap::new()),
            cache: Arc::new(ResolventCache::new()),
        })
    }

    /// Shares `cache` with other operators; entries are keyed by grid and backend.
    pub fn with_cache(mut self, cache: Arc<ResolventCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn spectral_point(&self) -> f64 {
        SPECTRAL_POINT
    }

    pub fn cache(&self) -> &Arc<ResolventCache> {
        &self.cache
    }

    fn matrices(&self) -> &DifferentiationMatrices {
        self.matrices
            .get_or_init(|| DifferentiationMatrices::new(&self.grid))
    }

    fn system(&self, k: usize) -> Result<Arc<ModeSystem>> {
        if let Some(s) = self.systems.read().expect("poisoned").get(&k) {
            return Ok(s.clone());
        }
        let built = Arc::new(ModeSystem::new(&self.grid, self.matrices(), k)?);
        let mut map = self.systems.write().expect("poisoned");
        Ok(map.entry(k).or_insert(built).clone())
    }

    fn check_profile(&self, p: &RadialProfile) -> Result<()> {
        if p.abs_mode() > self.grid.angular_order() {
            return Err(Error::accuracy(format!(
                "mode {} exceeds angular_order {}",
                p.mode,
                self.grid.angular_order()
            )));
        }
        if p.values.len() != self.grid.radial_count() {
            return Err(Error::domain(format!(
                "profile has {} samples but the grid has {} radial nodes",
                p.values.len(),
                self.grid.radial_count()
            )));
        }
        if p.values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::domain("profile contains non-finite samples"));
        }
        Ok(())
    }

    /// `G` applied to one mode.
    pub fn apply_mode(&self, p: &RadialProfile) -> Result<RadialProfile> {
        self.check_profile(p)?;
        let key = CacheKey::new(self.backend, &self.grid, p.abs_mode(), &p.values);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(RadialProfile::new(p.mode, hit.as_ref().clone()));
        }
        let values = match self.backend {
            Backend::ModeBvp => self
                .system(p.abs_mode())?
                .solve(&p.values, self.tolerance)?,
            Backend::KernelConvolution => {
                green::apply(&self.grid, p.abs_mode(), &p.values, self.tolerance)?
            }
        };
        let stored = self.cache.insert_if_absent(key, values);
        Ok(RadialProfile::new(p.mode, stored.as_ref().clone()))
    }

    /// `G f`, solving distinct modes in parallel.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        let profiles: Vec<&RadialProfile> = f.modes().collect();
        let out = profiles
            .par_iter()
            .map(|p| self.apply_mode(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridFunction::from_modes(out))
    }

    /// The forward operator `2(Δ + ½)` on one mode, by spectral differentiation.
    pub fn forward_mode(&self, p: &RadialProfile) -> Result<RadialProfile> {
        self.check_profile(p)?;
        let values = self.matrices().forward(&self.grid, p.abs_mode(), &p.values);
        Ok(RadialProfile::new(p.mode, values))
    }

    pub fn forward(&self, f: &GridFunction) -> Result<GridFunction> {
        let out = f
            .modes()
            .map(|p| self.forward_mode(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridFunction::from_modes(out))
    }
}
