"""Smoke test for the wpcurv extension module.

Build with `maturin develop -m crates/python/Cargo.toml`, or build the cdylib
with cargo and put it on PYTHONPATH as wpcurv.so.
"""

import math

import wpcurv


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert wpcurv.rho(0j) == 4.0
    assert close(wpcurv.hyperbolic_disk_radius(math.log(3.0)), 0.5, 1e-15)

    limit = math.sqrt(3.0 / (4.0 * math.pi))
    assert close(wpcurv.sup_norm_exact(2), limit, 1e-15)
    assert close(wpcurv.thick_part_constant(1.0), 0.68179023674303738038, 1e-12)

    bounds = wpcurv.thick_part_bounds(2, 0.5)
    assert bounds["dim"] == 3
    assert bounds["lower_holo"] <= bounds["upper_holo"] < 0.0

    nu = wpcurv.HarmonicBeltrami({2: 1.0, 5: 0.5j})
    assert close(nu.wp_norm() ** 2, 18.0 * math.pi, 1e-14)
    assert close(abs(nu(0j)), 1.5, 1e-14)
    assert close(abs(wpcurv.HarmonicBeltrami.basis(2)(0j)), limit, 1e-14)
    value, radius, _ = wpcurv.HarmonicBeltrami.basis(2).sup_norm()
    assert close(value, limit, 1e-12) and radius == 0.0
    assert nu.center_bound_chain(0.5)["holds"]
    e2 = wpcurv.HarmonicBeltrami.basis(2)
    assert close((e2 + 2.0 * e2).wp_norm(), 3.0, 1e-14)

    kernel = wpcurv.ProjectionKernel(16)
    assert kernel.lambda_sup() <= 3.0 / (4.0 * math.pi) + 1e-12

    checks = wpcurv.resolvent_selftest(64, 8)
    assert all(passed for _, _, _, passed in checks), checks

    ctx = wpcurv.CurvatureContext(64, 16)
    s2, err = ctx.holo_sectional(2)
    assert close(s2, -0.11671362493405658, 1e-10), s2
    assert err >= 0.0
    k, _ = ctx.sectional(2, 3)
    assert -3.0 / (2.0 * math.pi) <= k < 0.0
    ricci = ctx.ricci_partial(2, 10)
    assert len(ricci["partial_sums"]) == 9

    try:
        ctx.holo_sectional(1)
    except ValueError:
        pass
    else:
        raise AssertionError("index 1 must be rejected")

    assert wpcurv.cli(["holo", "--n-max", "1"]) == 2
    print("wpcurv smoke test passed")


if __name__ == "__main__":
    main()
