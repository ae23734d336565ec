use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wpcurv_core::resolvent::{
    manufactured_cases, resolvent_selftest, structural_checks, StructuralTolerances,
};
use wpcurv_core::{build_grid, Backend, GridFunction, RadialProfile, ResolventOperator};

fn operator(backend: Backend) -> &'static ResolventOperator {
    static BVP: OnceLock<ResolventOperator> = OnceLock::new();
    static KERNEL: OnceLock<ResolventOperator> = OnceLock::new();
    let cell = match backend {
        Backend::ModeBvp => &BVP,
        Backend::KernelConvolution => &KERNEL,
    };
    cell.get_or_init(|| ResolventOperator::new(build_grid(64, 8).unwrap(), backend).unwrap())
}

fn random_function(seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::random_band_limited(operator(Backend::ModeBvp).grid(), &mut rng, 3, 4)
}

fn relative_difference(a: &GridFunction, b: &GridFunction) -> f64 {
    let scale = a.modes().map(|p| p.sup_norm()).fold(0.0, f64::max);
    a.max_profile_difference(b) / scale.max(1e-300)
}

/// `h - (t²/8) Δ_E h` by a fourth-order central stencil in Cartesian coordinates.
fn forward_by_finite_differences(h: &dyn Fn(f64, f64) -> Complex64, x: f64, y: f64) -> Complex64 {
    let d = 1e-3;
    let second = |dx: f64, dy: f64| {
        (-h(x + 2.0 * dx, y + 2.0 * dy) + 16.0 * h(x + dx, y + dy) - 30.0 * h(x, y)
            + 16.0 * h(x - dx, y - dy)
            - h(x - 2.0 * dx, y - 2.0 * dy))
            / (12.0 * d * d)
    };
    let laplacian = second(d, 0.0) + second(0.0, d);
    let t = 1.0 - x * x - y * y;
    h(x, y) - laplacian * (t * t / 8.0)
}

#[test]
fn manufactured_sources_match_finite_differences() {
    for case in manufactured_cases() {
        let k = case.mode;
        let h = move |x: f64, y: f64| {
            let z = Complex64::new(x, y);
            let r2 = z.norm_sqr();
            let angular = if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                z.powi(k as i32)
            };
            angular * (case.solution)(r2)
        };
        for &(x, y) in &[(0.1, 0.2), (0.45, -0.3), (-0.6, 0.5), (0.0, 0.85)] {
            let z = Complex64::new(x, y);
            let angular = if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                z.powi(k as i32)
            };
            let expected = angular * (case.source)(z.norm_sqr());
            let got = forward_by_finite_differences(&h, x, y);
            assert!(
                (got - expected).norm() <= 1e-7 * expected.norm().max(1e-3),
                "{} at ({x}, {y}): {got} vs {expected}",
                case.name
            );
        }
    }
}

#[test]
fn both_backends_invert_manufactured_sources() {
    for backend in [Backend::ModeBvp, Backend::KernelConvolution] {
        let op = operator(backend);
        let grid = op.grid();
        for case in manufactured_cases() {
            let src = RadialProfile::from_reduced(grid, case.mode, |x| {
                Complex64::new((case.source)(x), 0.0)
            });
            let want = RadialProfile::from_reduced(grid, case.mode, |x| {
                Complex64::new((case.solution)(x), 0.0)
            });
            let got = op.apply_mode(&src).unwrap();
            let err = got
                .values
                .iter()
                .zip(&want.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err <= 1e-10, "{backend:?} {}: {err}", case.name);
        }
        assert!(resolvent_selftest(op).unwrap().passed());
    }
}

#[test]
fn forward_inverts_resolvent() {
    let op = operator(Backend::ModeBvp);
    let f = random_function(5);
    let back = op.forward(&op.apply(&f).unwrap()).unwrap();
    assert!(relative_difference(&f, &back) < 1e-8);
}

#[test]
fn constants_are_fixed() {
    for backend in [Backend::ModeBvp, Backend::KernelConvolution] {
        let op = operator(backend);
        let one = GridFunction::constant(op.grid(), 1.0);
        let g = op.apply(&one).unwrap();
        assert!(one.max_profile_difference(&g) < 1e-10, "{backend:?}");
    }
}

#[test]
fn backends_agree_on_random_functions() {
    for seed in 0..20 {
        let f = random_function(1000 + seed);
        let a = operator(Backend::ModeBvp).apply(&f).unwrap();
        let b = operator(Backend::KernelConvolution).apply(&f).unwrap();
        let diff = relative_difference(&a, &b);
        assert!(diff <= 1e-6, "seed {seed}: {diff}");
    }
}

#[test]
fn apply_is_modewise() {
    let op = operator(Backend::KernelConvolution);
    let f = random_function(77);
    let whole = op.apply(&f).unwrap();
    for p in f.modes() {
        let single = op.apply_mode(p).unwrap();
        let from_whole = whole.mode(p.mode).unwrap();
        assert_eq!(single.mode, p.mode);
        let err = single
            .values
            .iter()
            .zip(&from_whole.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12 * single.sup_norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn preserves_angular_modes(k in -8i64..=8, c0 in -1.0..1.0f64, c1 in -1.0..1.0f64) {
        let op = operator(Backend::ModeBvp);
        let p = RadialProfile::from_reduced(op.grid(), k, |x| Complex64::new(c0 + c1 * x, c1) * (1.0 - x).powi(2));
        let out = op.apply(&GridFunction::from_modes([p])).unwrap();
        let modes: Vec<i64> = out.modes().map(|p| p.mode).collect();
        prop_assert_eq!(modes, vec![k]);
    }

    #[test]
    fn structural_properties(seed in any::<u64>()) {
        let op = operator(Backend::ModeBvp);
        let f = random_function(seed);
        let g = random_function(seed.wrapping_add(1));
        let report = structural_checks(op, &f, &g, &StructuralTolerances::default()).unwrap();
        prop_assert!(report.passed(), "{:?}", report);

        let gf = op.apply(&f).unwrap();
        let gg = op.apply(&g).unwrap();
        let lhs = gf.pairing(&g, op.grid());
        let rhs = f.pairing(&gg, op.grid());
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn resolvent_is_linear(seed in any::<u64>(), a in -2.0..2.0f64) {
        let op = operator(Backend::ModeBvp);
        let f = random_function(seed);
        let g = random_function(seed ^ 0x9e37);
        let combo = f.scaled(Complex64::new(a, 0.0)).add(&g);
        let lhs = op.apply(&combo).unwrap();
        let rhs = op.apply(&f).unwrap().scaled(Complex64::new(a, 0.0)).add(&op.apply(&g).unwrap());
        prop_assert!(relative_difference(&lhs, &rhs) < 1e-12 * (1.0 + a.abs()) * 10.0);
    }
}
