"""Ratio series, separation certificates, rate estimates, iteration audits."""

import dataclasses

import numpy as np
import pytest

from conftest import scalar_config
from qvi import (
    PiecewiseQuad,
    SolveTrace,
    build_separation_certificate,
    estimate_rates,
    fejer_audit,
    gen_recovery,
    piecewise_problem,
    ratio_series,
    run_recovery,
    sine_problem,
    solve,
    verify_disjointness,
)

THREE_HALF_PI = 1.5 * np.pi


def _trace_with_z(z_values):
    z = np.asarray(z_values, dtype=np.float64)[:, None]
    n = z.shape[0]
    return SolveTrace(
        u=np.zeros((n + 1, 1)),
        z=z,
        lam=np.ones(n + 1),
        errors=np.zeros(n),
        residuals=np.zeros(n),
        operator_diffs=np.zeros(n),
    )


# --- ratio series --------------------------------------------------------

def test_ratio_identity_for_piecewise_quadratic():
    # on [-1, 1] the operator is z^2, so |<F(z), z>| / |z|^3 is identically 1
    f, box = piecewise_problem()
    result = solve(f, box, 0.6, scalar_config(mu=0.3, col_tol=1e-6, max_iters=2000))
    assert result.status == "converged"
    series = ratio_series(result.trace, f, np.array([0.0]), eps=1.0)
    assert series.values.size > 0
    np.testing.assert_allclose(series.values, 1.0, rtol=0, atol=1e-12)


def test_ratio_blows_up_toward_negative_one():
    # approaching -1 from inside, F(z) -> 1 while the distance vanishes, so
    # the ratio grows without bound
    f = PiecewiseQuad()
    z = -1.0 + 4.0 ** -np.arange(1.0, 16.0)
    series = ratio_series(_trace_with_z(z), f, np.array([-1.0]), eps=1.0)
    assert series.values.size == 15
    assert np.all(np.diff(series.values) > 0)
    assert series.values[-1] > 1e15 * series.values[0]


def test_ratio_filters_landed_entries():
    f = PiecewiseQuad()
    series = ratio_series(_trace_with_z([0.5, 0.0, 0.25]), f, np.array([0.0]), eps=1.0)
    np.testing.assert_array_equal(series.index, [1, 3])
    np.testing.assert_allclose(series.values, 1.0, atol=1e-12)


def test_ratio_positive_on_recovery_run():
    out = run_recovery(gen_recovery(64, 128, 5, seed=2))
    assert out.result.status == "converged"
    assert out.ratio_series.min_ratio > 0.0


def test_ratio_series_validation():
    f = PiecewiseQuad()
    with pytest.raises(ValueError):
        ratio_series(None, f, np.array([0.0]))
    with pytest.raises(ValueError):
        ratio_series(_trace_with_z([0.5]), f, np.array([0.0]), eps=-0.5)
    empty = ratio_series(_trace_with_z([0.0]), f, np.array([0.0]))
    with pytest.raises(ValueError):
        empty.min_ratio


# --- separation certificates ---------------------------------------------

def test_certificate_pair_on_the_line():
    cert = build_separation_certificate([0.0, 3.0])
    assert cert.delta == pytest.approx(0.75)
    assert cert.directions[0, 1, 0] == 1.0 and cert.directions[1, 0, 0] == -1.0
    assert verify_disjointness(cert, samples=10_000, seed=0)


def test_certificate_sine_lattice_prefix():
    pts = [0.0] + [2 * k * np.pi + THREE_HALF_PI for k in range(2)]
    cert = build_separation_certificate(pts)
    assert cert.delta == pytest.approx(THREE_HALF_PI / 4)
    assert verify_disjointness(cert, samples=10_000, seed=0)


def test_certificate_planar_triangle():
    cert = build_separation_certificate([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert cert.delta == pytest.approx(0.25)
    # brute force the defining margin over all ordered pairs
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            gap = np.linalg.norm(cert.points[j] - cert.points[i])
            assert abs(cert.directions[i, j] @ (cert.points[j] - cert.points[i])) == pytest.approx(gap)
            assert gap >= 4 * cert.delta
            assert np.linalg.norm(cert.directions[i, j]) == pytest.approx(1.0, abs=1e-12)
    assert verify_disjointness(cert, samples=10_000, seed=1)


def test_certificate_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        build_separation_certificate([1.0])
    with pytest.raises(ValueError):
        build_separation_certificate([1.0, 1.0, 2.0])


def test_overwide_slabs_are_rejected():
    cert = build_separation_certificate([0.0, 3.0])
    # half the distance violates the quarter-distance margin: the midpoint
    # 1.5 sits on both slab boundaries
    bad = dataclasses.replace(cert, delta=1.5)
    assert not verify_disjointness(bad, samples=1000, seed=0)


# --- rate estimation ------------------------------------------------------

def test_rate_estimator_geometric():
    for rho in (0.3, 0.7, 0.95):
        errors = 2.0 * rho ** np.arange(1, 120)
        est = estimate_rates(errors, tail_window=20)
        assert est.q_factor == pytest.approx(rho, abs=1e-6)


def test_rate_estimator_power_law():
    for order in (1.0, 2.0):
        errors = 3.0 / np.arange(1, 200, dtype=np.float64) ** order
        est = estimate_rates(errors, tail_window=20)
        assert est.sublinear_order == pytest.approx(order, abs=0.05)
        assert est.q_factor < 1.0 + 1e-9


def test_rate_estimator_validation():
    with pytest.raises(ValueError):
        estimate_rates([1.0, 0.5], tail_window=20)
    with pytest.raises(ValueError):
        estimate_rates([1.0, -0.5, 0.2, 0.1], tail_window=3)
    with pytest.raises(ValueError):
        estimate_rates([1.0, 0.5, 0.2], tail_window=2)


def test_rate_estimator_on_solver_run():
    from qvi import cubic_problem

    f, box = cubic_problem()
    result = solve(f, box, 0.6, scalar_config(mu=0.3, col_tol=1e-6))
    errors = np.abs(result.trace.u[:, 0])
    est = estimate_rates(errors[errors > 0], tail_window=20)
    assert est.q_factor < 1.0


# --- contraction audit ----------------------------------------------------

def corrupted_audit_worst_slack(trace, f, u, mu):
    """Audit each iteration with the correction term dropped (u_{n+1} := z_n)."""
    worst = -np.inf
    for n in range(trace.iterations):
        step = SolveTrace(
            u=np.vstack([trace.u[n], trace.z[n]]),
            z=trace.z[n : n + 1],
            lam=trace.lam[n : n + 2],
            errors=trace.errors[n : n + 1],
            residuals=trace.residuals[n : n + 1],
            operator_diffs=trace.operator_diffs[n : n + 1],
        )
        worst = max(worst, fejer_audit(step, f, u, mu))
    return worst


def test_fejer_audit_negative_control():
    f, ray = sine_problem()
    result = solve(f, ray, 4.0, scalar_config(mu=0.5, col_tol=1e-6))
    assert fejer_audit(result.trace, f, np.array([0.0]), mu=0.5) <= 1e-9
    # dropping the correction term must break the inequality somewhere
    assert corrupted_audit_worst_slack(result.trace, f, np.array([0.0]), 0.5) > 1e-6


def test_fejer_audit_needs_trace():
    f, _ = sine_problem()
    with pytest.raises(ValueError):
        fejer_audit(None, f, np.array([0.0]), mu=0.5)
