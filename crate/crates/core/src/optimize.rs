//! One-dimensional maximization used by the sup-norm computations.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
/// Returns the best abscissa seen and its value, endpoints included.
pub(crate) fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(lo, f(lo)), (hi, f(hi)), (c, fc), (d, fd), (mid, f(mid))]
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        })
}

/// Sample `f` on `samples + 1` equispaced points of `[a, b]`, then polish the
/// best sample by golden section on its neighbouring bracket.
pub(crate) fn sweep_and_polish<F>(f: F, a: f64, b: f64, samples: usize, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let h = (b - a) / samples as f64;
    let (best_j, _) = (0..=samples).map(|j| (j, f(a + h * j as f64))).fold(
        (0, f64::NEG_INFINITY),
        |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        },
    );
    let left = (a + h * best_j as f64 - h).max(a);
    let right = (a + h * best_j as f64 + h).min(b);
    golden_section_max(f, left, right, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!(fx <= 0.0 && fx > -1e-14);
    }

    #[test]
    fn finds_endpoint_maximum() {
        let (x, _) = sweep_and_polish(|x| 1.0 - x, 0.0, 1.0, 50, 1e-12);
        assert!(x.abs() < 1e-11);
    }

    #[test]
    fn sweep_picks_global_peak() {
        let f =
            |x: f64| (-(x - 0.2).powi(2) * 400.0).exp() + 2.0 * (-(x - 0.8).powi(2) * 400.0).exp();
        let (x, _) = sweep_and_polish(f, 0.0, 1.0, 200, 1e-12);
        assert!((x - 0.8).abs() < 1e-6);
    }
}
