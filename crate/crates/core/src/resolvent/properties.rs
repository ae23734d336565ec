//! Self-tests of `G`: fixed constants, manufactured solutions, and the
//! positivity, mass, maximum-principle and Cauchy–Schwarz properties.

use num_complex::Complex64;
use serde::Serialize;

use super::{GridFunction, RadialProfile, ResolventOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            error,
            tolerance,
            passed: error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub checks: Vec<CheckResult>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// A smooth `h = u^{|k|} p(u²) e^{ikθ}` together with `2(Δ + ½) h`, both as
/// reduced profiles in `x = u²`.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub mode: i64,
    pub solution: fn(f64) -> f64,
    pub source: fn(f64) -> f64,
}

pub fn manufactured_cases() -> [ManufacturedCase; 3] {
    [
        ManufacturedCase {
            name: "(1-|z|^2)^2",
            mode: 0,
            solution: |x| (1.0 - x).powi(2),
            source: |x| 2.0 * (1.0 - x).powi(3),
        },
        ManufacturedCase {
            name: "z^3 (1-|z|^2)^2",
            mode: 3,
            solution: |x| (1.0 - x).powi(2),
            source: |x| 5.0 * (1.0 - x).powi(3),
        },
        ManufacturedCase {
            name: "z (1+|z|^2)(1-|z|^2)^3",
            mode: 1,
            solution: |x| (1.0 + x) * (1.0 - x).powi(3),
            source: |x| {
                let t = 1.0 - x;
                t.powi(3) * (-4.0 + 17.0 * t - 10.0 * t * t)
            },
        },
    ]
}

pub const CONSTANT_TOLERANCE: f64 = 1e-8;
pub const MANUFACTURED_RTOL: f64 = 1e-6;

/// `G(1) = 1` in the sup norm and `G(2(Δ+½)h) = h` for the manufactured cases.
pub fn resolvent_selftest(op: &ResolventOperator) -> Result<SelfTestReport> {
    let grid = op.grid();
    let one = GridFunction::constant(grid, 1.0);
    let g_one = op.apply(&one)?;
    let mut checks = vec![CheckResult::new(
        "G(1) = 1, sup error",
        g_one.max_profile_difference(&one),
        CONSTANT_TOLERANCE,
    )];
    for case in manufactured_cases() {
        let real = |f: fn(f64) -> f64| move |x: f64| Complex64::new(f(x), 0.0);
        let source = RadialProfile::from_reduced(grid, case.mode, real(case.source));
        let expected = RadialProfile::from_reduced(grid, case.mode, real(case.solution));
        let got = op.apply_mode(&source)?;
        let scale = (0..grid.radial_count())
            .map(|i| expected.radial_value(grid, i).norm())
            .fold(0.0, f64::max);
        let err = (0..grid.radial_count())
            .map(|i| (got.radial_value(grid, i) - expected.radial_value(grid, i)).norm())
            .fold(0.0, f64::max);
        checks.push(CheckResult::new(
            format!("G(2(Δ+½)h) = h for h = {}, relative error", case.name),
            err / scale,
            MANUFACTURED_RTOL,
        ));
    }
    Ok(SelfTestReport { checks })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralTolerances {
    /// Allowed negativity of `∬ G(f) f ρ`.
    pub positivity: f64,
    /// Relative mismatch of `∬ G(f) ρ` and `∬ f ρ`.
    pub mass: f64,
    /// Allowed negativity of `min G(f²)`.
    pub minimum: f64,
    /// Allowed excess of `|G(fg)|` over `G(f²)^{½} G(g²)^{½}` at any node.
    pub pointwise: f64,
}

impl Default for StructuralTolerances {
    fn default() -> Self {
        StructuralTolerances {
            positivity: 1e-7,
            mass: 1e-7,
            minimum: 1e-9,
            pointwise: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    /// `∬ G(f) f ρ`.
    pub quadratic_form: f64,
    pub positivity_ok: bool,
    pub mass_in: f64,
    pub mass_out: f64,
    pub mass_ok: bool,
    /// `min` over nodes of `G(f²)`.
    pub min_value: f64,
    pub minimum_ok: bool,
    /// `max` over nodes of `|G(fg)| - G(f²)^{½} G(g²)^{½}`.
    pub cauchy_schwarz_excess: f64,
    pub cauchy_schwarz_ok: bool,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.positivity_ok && self.mass_ok && self.minimum_ok && self.cauchy_schwarz_ok
    }
}

/// Checks the four structural properties of `G` on real `f`, `g`.
pub fn structural_checks(
    op: &ResolventOperator,
    f: &GridFunction,
    g: &GridFunction,
    tol: &StructuralTolerances,
) -> Result<StructuralReport> {
    if !f.is_real(1e-12) || !g.is_real(1e-12) {
        return Err(Error::domain("property suite needs real-valued functions"));
    }
    let grid = op.grid();
    let gf = op.apply(f)?;
    let quadratic_form = gf.pairing(f, grid).re;
    let mass_in = f.integrate_hyperbolic(grid).re;
    let mass_out = gf.integrate_hyperbolic(grid).re;

    let ff = f.mul(f, grid);
    let gg = g.mul(g, grid);
    let fg = f.mul(g, grid);
    let (g_ff, g_gg, g_fg) = (op.apply(&ff)?, op.apply(&gg)?, op.apply(&fg)?);
    let (v_ff, v_gg, v_fg) = (
        g_ff.values_at_nodes(grid),
        g_gg.values_at_nodes(grid),
        g_fg.values_at_nodes(grid),
    );
    let mut min_value = f64::INFINITY;
    let mut excess = f64::NEG_INFINITY;
    for i in 0..v_ff.len() {
        for j in 0..v_ff[i].len() {
            let a = v_ff[i][j].re;
            let b = v_gg[i][j].re;
            min_value = min_value.min(a);
            let bound = a.max(0.0).sqrt() * b.max(0.0).sqrt();
            excess = excess.max(v_fg[i][j].norm() - bound);
        }
    }
    Ok(StructuralReport {
        quadratic_form,
        positivity_ok: quadratic_form >= -tol.positivity,
        mass_in,
        mass_out,
        mass_ok: (mass_out - mass_in).abs() <= tol.mass * mass_in.abs().max(1.0),
        min_value,
        minimum_ok: min_value >= -tol.minimum,
        cauchy_schwarz_excess: excess,
        cauchy_schwarz_ok: excess <= tol.pointwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_grid;
    use crate::resolvent::Backend;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn selftest_passes_on_moderate_grid() {
        let op = ResolventOperator::new(build_grid(48, 4).unwrap(), Backend::ModeBvp).unwrap();
        let report = resolvent_selftest(&op).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks.len(), 4);
    }

    #[test]
    fn suite_passes_on_random_pair() {
        let op = ResolventOperator::new(build_grid(48, 8).unwrap(), Backend::ModeBvp).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = GridFunction::random_band_limited(op.grid(), &mut rng, 3, 3);
        let g = GridFunction::random_band_limited(op.grid(), &mut rng, 3, 3);
        let report = structural_checks(&op, &f, &g, &StructuralTolerances::default()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.quadratic_form > 0.0);
    }

    #[test]
    fn suite_rejects_complex_input() {
        let op = ResolventOperator::new(build_grid(16, 2).unwrap(), Backend::ModeBvp).unwrap();
        let f = GridFunction::from_modes([RadialProfile::from_reduced(op.grid(), 1, |_| {
            Complex64::new(1.0, 0.0)
        })]);
        assert!(structural_checks(&op, &f, &f, &StructuralTolerances::default()).is_err());
    }
}
