"""Smoke test for the circadia_py extension.

Build and install first:  pip install ./crates/py
Then run:                 python python/smoke_test.py
"""

import json
import math

import numpy as np

import circadia_py as cz


def check(name, ok):
    print(f"{'PASS' if ok else 'FAIL'} {name}")
    return ok


def main():
    results = []
    cos = cz.Potential.cosine()
    rc = cz.Circuit(0.3, 10.0, 5.0)
    results.append(check("beta = lambda_j / xi^2", abs(rc.beta - 0.05) < 1e-15))

    # Root of phi_c + beta u'(phi_c) = phi, checked by substitution.
    sol = cz.solve_consistency(cos, 0.5, 1.2)
    roots = sol["roots"]
    results.append(
        check(
            "consistency root satisfies its equation",
            len(roots) == 1 and abs(roots[0] + 0.5 * math.sin(roots[0]) - 1.2) < 1e-12,
        )
    )

    try:
        cz.effective_potential(cos, cz.Circuit(0.0, 1.0, 2.0), [0.0])
        results.append(check("supercritical refusal raises RegimeError", False))
    except cz.RegimeError:
        results.append(check("supercritical refusal raises RegimeError", True))

    # Linear inductor: V = lambda_j phi^2 / (2 (1 + beta)).
    quad = cz.Potential.polynomial_even([0.0, 0.5])
    phis = list(np.linspace(-2.0, 2.0, 9))
    v = cz.effective_potential(quad, rc, phis)
    want = [5.0 * p * p / (2.0 * 1.05) for p in phis]
    got = [s["v"] for s in v["samples"]]
    results.append(check("quadratic effective potential", np.allclose(got, want, atol=1e-10)))

    # Charge-basis levels against a dense diagonalization in numpy.
    n = np.arange(-30, 31)
    h = np.diag(n.astype(float) ** 2) - 2.5 * (np.eye(61, k=1) + np.eye(61, k=-1))
    dense = np.linalg.eigvalsh(h)[:4]
    levels = cz.compact_levels(5.0, 4)
    results.append(check("compact levels match dense oracle", np.allclose(levels, dense, atol=1e-9)))

    spec = {"variant": "compact1_d", "kinetic": 1.0, "lambda_j": 5.0, "ng": 0.0, "n_max": 30}
    r = cz.lowest_eigenvalues(json.dumps(spec), 4)
    results.append(check("spec round trip", np.allclose(r["eigenvalues"], dense, atol=1e-9)))

    # Naive ladder is independent of lambda_j: spacing xi sqrt(2).
    na = cz.naive_adiabatic(0.4, 10.0, 3)
    sp = np.diff(na["formula"]) / 0.4**4
    results.append(check("naive adiabatic spacing", np.allclose(sp, 10.0 * math.sqrt(2.0))))

    sweep = cz.bo_sweep([0.6, 0.45, 0.3], [0.0, 0.5, 1.0], 10.0, 5.0, cos)
    results.append(check("bo sweep has a verdict", isinstance(sweep["verdict"], str)))

    # Energy is conserved along a short trajectory.
    traj = cz.integrate(rc, cos, (1.0, 0.0, 0.3, 0.0), 5.0, dt=1e-3, drift_tolerance=1e-6)
    results.append(check("integrator conserves energy", traj["max_drift"] < 1e-6))
    period = cz.slow_period(rc, cos)
    results.append(check("slow period", abs(period - 2 * math.pi * math.sqrt(1.05 / 0.05)) < 1e-8))

    # Foster fit of C w - 1/(L0 w) + (w / L1) / (W^2 - w^2).
    w = np.linspace(0.3, 9.0, 150)
    w = w[np.abs(w - 4.0) > 0.05]
    im = 2.0 * w - 1.0 / (0.5 * w) + 3.0 * w / (16.0 - w**2)
    fit = cz.fit_foster(list(w), list(im), 1)
    m = fit["model"]
    results.append(
        check(
            "foster fit recovers network",
            abs(m["c_inf"] - 2.0) < 1e-8
            and abs(m["l_zero"] - 0.5) < 1e-8
            and abs(m["resonances"][0]["omega"] - 4.0) < 1e-8,
        )
    )

    passed = sum(results)
    print(f"{passed}/{len(results)} checks passed")
    raise SystemExit(0 if passed == len(results) else 1)


if __name__ == "__main__":
    main()
