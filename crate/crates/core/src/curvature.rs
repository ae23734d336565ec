//! Weil–Petersson curvature at the base point of the universal Teichmüller
//! space, in the orthonormal basis `ν_n`.
//!
//! With `I(a, b; c, d) = ∬ G(ν_a ν̄_b) ν_c ν̄_d ρ d²z` the curvature tensor is
//!
//! ```text
//! R_{αβ̄λδ̄} = -I(α, β; λ, δ) - I(α, δ; λ, β).
//! ```
//!
//! `ν_a ν̄_b` is the single mode `b - a` with reduced profile
//! `c_a c_b (1 - x)⁴ / 16 · x^{min(a,b) - 2}`, so each integral is one radial
//! solve followed by one radial quadrature.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::beltrami::{basis_normalization, thick_part_constant};
use crate::error::{Error, Result};
use crate::geometry::{build_grid, QuadratureGrid, DEFAULT_ANGULAR_ORDER, DEFAULT_RADIAL_COUNT};
use crate::resolvent::{
    Backend, RadialProfile, ResolventCache, ResolventOperator, DEFAULT_SOLVER_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    RiemannEntry,
    HoloSectional,
    Sectional,
    RicciPartial,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::RiemannEntry => "riemann_entry",
            Quantity::HoloSectional => "holo_sectional",
            Quantity::Sectional => "sectional",
            Quantity::RicciPartial => "ricci_partial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridMeta {
    pub radial_count: usize,
    pub coarse_radial_count: usize,
    pub angular_order: usize,
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub quantity: Quantity,
    pub indices: Vec<usize>,
    /// Complex for Riemann entries; the other quantities are real.
    pub value: Complex64,
    pub grid: GridMeta,
    pub est_error: f64,
}

impl CurvatureReport {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// Partial sums `Σ_{β=2}^{N} R_{αβ̄βᾱ}` for `N = 2 … cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciSeries {
    pub alpha: usize,
    pub cutoffs: Vec<usize>,
    pub partial_sums: Vec<f64>,
    pub est_errors: Vec<f64>,
    pub grid: GridMeta,
}

impl RicciSeries {
    /// The last partial sum.
    pub fn raw(&self) -> f64 {
        *self.partial_sums.last().expect("series is non-empty")
    }

    /// Aitken's Δ² applied to the last three partial sums.
    pub fn aitken(&self) -> Option<f64> {
        let n = self.partial_sums.len();
        if n < 3 {
            return None;
        }
        let (s0, s1, s2) = (
            self.partial_sums[n - 3],
            self.partial_sums[n - 2],
            self.partial_sums[n - 1],
        );
        let d1 = s2 - s1;
        let d2 = d1 - (s1 - s0);
        Some(if d2 == 0.0 { s2 } else { s2 - d1 * d1 / d2 })
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.partial_sums.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Shared state for curvature evaluation: a working grid and a half-resolution
/// grid whose disagreement gives the error estimate.
#[derive(Debug)]
pub struct CurvatureContext {
    fine: ResolventOperator,
    coarse: ResolventOperator,
}

/// Round-off allowance added to every error estimate, relative and absolute.
/// Both resolutions are converged to round-off at the default grid, where the
/// solves carry relative errors of a few `1e-13`.
const ROUNDOFF_RELATIVE: f64 = 2e-12;
const ROUNDOFF_ABSOLUTE: f64 = 1e-16;

impl CurvatureContext {
    pub fn new(grid: QuadratureGrid, backend: Backend, tolerance: f64) -> Result<Self> {
        let cache = Arc::new(ResolventCache::new());
        let coarse_grid = grid.coarsened();
        Ok(CurvatureContext {
            fine: ResolventOperator::with_tolerance(grid, backend, tolerance)?
                .with_cache(cache.clone()),
            coarse: ResolventOperator::with_tolerance(coarse_grid, backend, tolerance)?
                .with_cache(cache),
        })
    }

    /// Uses `cache` for both resolution levels.
    pub fn with_cache(mut self, cache: Arc<ResolventCache>) -> Self {
        self.fine = self.fine.with_cache(cache.clone());
        self.coarse = self.coarse.with_cache(cache);
        self
    }

    pub fn with_defaults() -> Result<Self> {
        Self::new(
            build_grid(DEFAULT_RADIAL_COUNT, DEFAULT_ANGULAR_ORDER)?,
            Backend::ModeBvp,
            DEFAULT_SOLVER_TOLERANCE,
        )
    }

    pub fn operator(&self) -> &ResolventOperator {
        &self.fine
    }

    pub fn grid(&self) -> &QuadratureGrid {
        self.fine.grid()
    }

    pub fn grid_meta(&self) -> GridMeta {
        GridMeta {
            radial_count: self.fine.grid().radial_count(),
            coarse_radial_count: self.coarse.grid().radial_count(),
            angular_order: self.fine.grid().angular_order(),
            backend: self.fine.backend(),
        }
    }

    /// Largest basis index whose products stay within the angular resolution.
    pub fn capacity(&self) -> usize {
        self.grid().angular_order() + 2
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::domain(format!(
                "basis index must be at least 2, got {n}"
            )));
        }
        if n > self.capacity() {
            return Err(Error::config(format!(
                "basis index {n} exceeds capacity {} of angular_order {}",
                self.capacity(),
                self.grid().angular_order()
            )));
        }
        Ok(())
    }

    fn integral_on(
        op: &ResolventOperator,
        a: usize,
        b: usize,
        c: usize,
        d: usize,
    ) -> Result<Complex64> {
        let grid = op.grid();
        let k = b as i64 - a as i64;
        let lift = (a.min(b) - 2) as i32;
        let cab = basis_normalization(a) * basis_normalization(b) / 16.0;
        let source = RadialProfile::new(
            k,
            grid.squared_nodes()
                .iter()
                .zip(grid.complements())
                .map(|(&x, &t)| Complex64::new(cab * t.powi(4) * x.powi(lift), 0.0))
                .collect(),
        );
        let h = op.apply_mode(&source)?;
        let ccd = basis_normalization(c) * basis_normalization(d) / 4.0;
        let power = (k.unsigned_abs() as usize + c + d - 4) as i32;
        let mut sum = Complex64::new(0.0, 0.0);
        for (i, &u) in grid.radial_nodes().iter().enumerate() {
            let t = grid.complements()[i];
            sum += h.values[i] * (grid.radial_weights()[i] * ccd * t * t * u.powi(power));
        }
        let mode = k + d as i64 - c as i64;
        Ok(sum * grid.angular_mean(mode) * (2.0 * PI))
    }

    /// `∬ G(ν_a ν̄_b) ν_c ν̄_d ρ d²z` and its error estimate.
    pub fn curvature_integral(
        &self,
        a: usize,
        b: usize,
        c: usize,
        d: usize,
    ) -> Result<(Complex64, f64)> {
        for n in [a, b, c, d] {
            self.check_index(n)?;
        }
        let fine = Self::integral_on(&self.fine, a, b, c, d)?;
        let coarse = Self::integral_on(&self.coarse, a, b, c, d)?;
        let est = (fine - coarse).norm() + ROUNDOFF_RELATIVE * fine.norm() + ROUNDOFF_ABSOLUTE;
        Ok((fine, est))
    }

    fn report(
        &self,
        quantity: Quantity,
        indices: Vec<usize>,
        value: Complex64,
        est_error: f64,
    ) -> CurvatureReport {
        CurvatureReport {
            quantity,
            indices,
            value,
            grid: self.grid_meta(),
            est_error,
        }
    }

    /// `R_{αβ̄λδ̄}`.
    pub fn riemann_entry(
        &self,
        alpha: usize,
        beta: usize,
        lambda: usize,
        delta: usize,
    ) -> Result<CurvatureReport> {
        let (i1, e1) = self.curvature_integral(alpha, beta, lambda, delta)?;
        let (i2, e2) = self.curvature_integral(alpha, delta, lambda, beta)?;
        Ok(self.report(
            Quantity::RiemannEntry,
            vec![alpha, beta, lambda, delta],
            -i1 - i2,
            e1 + e2,
        ))
    }

    /// `s_n = R_{nn̄nn̄} = -2 ∬ G(|ν_n|²) |ν_n|² ρ`.
    pub fn holo_sectional(&self, n: usize) -> Result<CurvatureReport> {
        let (i, e) = self.curvature_integral(n, n, n, n)?;
        Ok(self.report(
            Quantity::HoloSectional,
            vec![n],
            Complex64::new(-2.0 * i.re, 0.0),
            2.0 * e,
        ))
    }

    /// Sectional curvature of the real plane spanned by `ν_m` and `ν_n`.
    pub fn sectional(&self, m: usize, n: usize) -> Result<CurvatureReport> {
        if m == n {
            return Err(Error::domain(format!(
                "sectional curvature needs distinct indices, got ({m}, {n})"
            )));
        }
        let (first, e1) = self.curvature_integral(m, n, m, n)?;
        let (second, e2) = self.curvature_integral(m, m, n, n)?;
        let (third, e3) = self.curvature_integral(m, n, n, m)?;
        let value = first.re - 0.5 * second.re - 0.5 * third.re;
        Ok(self.report(
            Quantity::Sectional,
            vec![m, n],
            Complex64::new(value, 0.0),
            e1 + 0.5 * (e2 + e3),
        ))
    }

    /// Ricci partial sums `Σ_{β=2}^{N} R_{αβ̄βᾱ}` for every `N ≤ cutoff`.
    pub fn ricci_partial(&self, alpha: usize, cutoff: usize) -> Result<RicciSeries> {
        self.check_index(alpha)?;
        if cutoff < alpha {
            return Err(Error::domain(format!(
                "cutoff {cutoff} must be at least alpha = {alpha}"
            )));
        }
        self.check_index(cutoff)?;
        let terms = (2..=cutoff)
            .into_par_iter()
            .map(|beta| self.riemann_entry(alpha, beta, beta, alpha))
            .collect::<Result<Vec<_>>>()?;
        let mut sum = 0.0;
        let mut err = 0.0;
        let mut partial_sums = Vec::with_capacity(terms.len());
        let mut est_errors = Vec::with_capacity(terms.len());
        for t in &terms {
            sum += t.value.re;
            err += t.est_error;
            partial_sums.push(sum);
            est_errors.push(err);
        }
        Ok(RicciSeries {
            alpha,
            cutoffs: (2..=cutoff).collect(),
            partial_sums,
            est_errors,
            grid: self.grid_meta(),
        })
    }

    /// `s_n` for each `n`, evaluated in parallel.
    pub fn holo_sweep(&self, ns: &[usize]) -> Result<Vec<CurvatureReport>> {
        ns.par_iter().map(|&n| self.holo_sectional(n)).collect()
    }

    /// `K_{m,n}` for each pair, evaluated in parallel.
    pub fn sectional_sweep(&self, pairs: &[(usize, usize)]) -> Result<Vec<CurvatureReport>> {
        pairs
            .par_iter()
            .map(|&(m, n)| self.sectional(m, n))
            .collect()
    }
}

/// Curvature bounds on the thick part of the moduli space of genus-`g`
/// surfaces with injectivity radius at least `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThickPartBounds {
    pub genus: u32,
    pub inj_radius: f64,
    pub c_value: f64,
    pub dim: u32,
    pub lower_holo: f64,
    pub lower_sect: f64,
    pub lower_ricci: f64,
    pub lower_scalar: f64,
    pub upper_holo: f64,
    pub upper_ricci: f64,
    pub upper_scalar: f64,
}

impl ThickPartBounds {
    /// `c_value` followed by the seven bounds, by field name.
    pub fn named_values(&self) -> [(&'static str, f64); 8] {
        [
            ("c_value", self.c_value),
            ("lower_holo", self.lower_holo),
            ("lower_sect", self.lower_sect),
            ("lower_ricci", self.lower_ricci),
            ("lower_scalar", self.lower_scalar),
            ("upper_holo", self.upper_holo),
            ("upper_ricci", self.upper_ricci),
            ("upper_scalar", self.upper_scalar),
        ]
    }

    /// Every lower bound lies below its upper bound and all bounds are negative.
    pub fn is_consistent(&self) -> bool {
        let bounds = &self.named_values()[1..];
        self.lower_holo <= self.upper_holo
            && self.lower_ricci <= self.upper_ricci
            && self.lower_scalar <= self.upper_scalar
            && bounds.iter().all(|(_, v)| *v < 0.0)
    }
}

pub fn thick_part_bounds(genus: u32, r: f64) -> Result<ThickPartBounds> {
    if genus < 2 {
        return Err(Error::domain(format!(
            "genus must be at least 2, got {genus}"
        )));
    }
    let c = thick_part_constant(r)?.value;
    let g = genus as f64;
    let dim = 3 * genus - 3;
    let c2 = c * c;
    let upper = -1.0 / (2.0 * PI * (g - 1.0));
    Ok(ThickPartBounds {
        genus,
        inj_radius: r,
        c_value: c,
        dim,
        lower_holo: -2.0 * c2,
        lower_sect: -2.0 * c2,
        lower_ricci: -2.0 * c2,
        lower_scalar: -2.0 * dim as f64 * c2,
        upper_holo: upper,
        upper_ricci: upper,
        upper_scalar: -3.0 * (3.0 * g - 2.0) / (4.0 * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CurvatureContext {
        CurvatureContext::new(build_grid(48, 12).unwrap(), Backend::ModeBvp, 1e-10).unwrap()
    }

    #[test]
    fn holo_matches_riemann_diagonal() {
        let ctx = small();
        let s = ctx.holo_sectional(2).unwrap();
        let r = ctx.riemann_entry(2, 2, 2, 2).unwrap();
        assert!((s.value - r.value).norm() < 1e-14);
        assert!(s.real() < 0.0 && s.real() >= -3.0 / (2.0 * PI));
    }

    #[test]
    fn off_stratum_entry_vanishes() {
        let ctx = small();
        assert!(ctx.riemann_entry(2, 3, 4, 5).unwrap().value.norm() < 1e-10);
    }

    #[test]
    fn index_errors() {
        let ctx = small();
        assert!(matches!(ctx.holo_sectional(1), Err(Error::Domain(_))));
        assert!(matches!(ctx.holo_sectional(15), Err(Error::Config(_))));
        assert!(matches!(ctx.sectional(3, 3), Err(Error::Domain(_))));
        assert!(matches!(ctx.ricci_partial(4, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn ricci_single_term_is_holo() {
        let ctx = small();
        let series = ctx.ricci_partial(2, 2).unwrap();
        assert_eq!(series.partial_sums.len(), 1);
        assert!((series.raw() - ctx.holo_sectional(2).unwrap().real()).abs() < 1e-15);
        assert!(series.aitken().is_none());
    }

    #[test]
    fn aitken_recovers_geometric_limit() {
        let series = RicciSeries {
            alpha: 2,
            cutoffs: vec![2, 3, 4],
            partial_sums: vec![1.0, 1.5, 1.75],
            est_errors: vec![0.0; 3],
            grid: small().grid_meta(),
        };
        assert!((series.aitken().unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_for_genus_two() {
        let b = thick_part_bounds(2, 0.5).unwrap();
        let c = thick_part_constant(0.5).unwrap().value;
        assert_eq!(b.dim, 3);
        assert_eq!(b.lower_scalar, -6.0 * c * c);
        assert_eq!(b.upper_scalar, -12.0 / (4.0 * PI));
        assert!(b.is_consistent());
        assert!(thick_part_bounds(1, 0.5).is_err());
        assert!(thick_part_bounds(2, 0.0).is_err());
    }
}
