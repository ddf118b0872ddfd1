import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavefloat import ConfigError
from wavefloat.helmholtz import (HelmholtzWorkspace, apply_helmholtz, solve_r1,
                                 trace_r1, trace_r1_far)


def test_constants_pass_through():
    ws = HelmholtzWorkspace(kappa=0.31, dx=0.07, n=40)
    v = ws.solve(np.full(40, 2.5))
    np.testing.assert_allclose(v, 2.5, atol=1e-13)
    np.testing.assert_allclose(ws.apply(np.ones(40)), 1.0, atol=1e-14)


def test_impulse_matches_dense_solve():
    ws = HelmholtzWorkspace(kappa=0.316228, dx=0.1, n=20)
    f = np.zeros(20)
    f[5] = 1.0
    dense = np.linalg.solve(ws.dense_matrix(), f)
    np.testing.assert_allclose(ws.solve(f), dense, atol=1e-12)


def test_smooth_rhs_matches_dense_solve():
    ws = HelmholtzWorkspace(kappa=0.316228, dx=0.05, n=64)
    x = np.arange(1, 65) * 0.05
    f = (1.0 + 0.3 * x) / (1.0 + x ** 2)  # shallow-water-flux-like sample
    dense = np.linalg.solve(ws.dense_matrix(), f)
    assert np.max(np.abs(ws.solve(f) - dense)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(n=st.integers(min_value=4, max_value=256), seed=st.integers(0, 10 ** 6))
def test_round_trip_property(n, seed):
    rng = np.random.default_rng(seed)
    ws = HelmholtzWorkspace(kappa=0.4, dx=0.08, n=n)
    f = rng.standard_normal(n)
    back = ws.apply(ws.solve(f))
    assert np.max(np.abs(back - f)) <= 1e-12 * max(1.0, np.max(np.abs(f)))


def test_apply_boundary_row_value():
    # V = (1, 0, 0, ...), kappa=0.1, dx=0.5: F_1 = 1 + (2/3)*0.01/0.25
    ws = HelmholtzWorkspace(kappa=0.1, dx=0.5, n=8)
    v = np.zeros(8)
    v[0] = 1.0
    f = ws.apply(v)
    assert f[0] == pytest.approx(1.0 + (2.0 / 3.0) * 0.01 / 0.25, abs=1e-14)
    assert f[0] == pytest.approx(1.026667, abs=1e-6)


def test_maximum_principle():
    rng = np.random.default_rng(3)
    ws = HelmholtzWorkspace(kappa=0.3, dx=0.1, n=50)
    for _ in range(20):
        f = rng.uniform(0.0, 1.0, size=50)
        assert np.all(ws.solve(f) >= -1e-14)


def test_trace_values():
    assert trace_r1(np.array([2.0, 2.0])) == pytest.approx(2.0)
    assert trace_r1(np.array([1.0, 4.0])) == pytest.approx(0.0)
    assert trace_r1_far(np.array([0.0, 1.0, 4.0])) == pytest.approx(4.0 * 4 / 3 - 1 / 3)


def test_trace_second_order_for_neumann_functions():
    # u(x) = cos(pi (x - ell)/(L - ell)) has u'(ell) = 0; trace -> u(ell) at O(dx^2)
    ell, L = 1.0, 7.0
    errs = []
    hs = []
    for n in (50, 100, 200, 400):
        dx = (L - ell) / (n + 1)
        x = ell + np.arange(1, n + 1) * dx
        u = np.cos(np.pi * (x - ell) / (L - ell))
        errs.append(abs(trace_r1(u) - 1.0))
        hs.append(dx)
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 1.8  # at least second order (superconvergent for this u)


def test_size_validation():
    ws = HelmholtzWorkspace(kappa=0.3, dx=0.1, n=10)
    with pytest.raises(ConfigError):
        ws.solve(np.zeros(9))
    with pytest.raises(ConfigError):
        ws.apply(np.zeros(11))
    with pytest.raises(ConfigError):
        trace_r1(np.array([1.0]))
    with pytest.raises(ConfigError):
        HelmholtzWorkspace(kappa=0.3, dx=0.1, n=1)


def test_module_level_wrappers():
    ws = HelmholtzWorkspace(kappa=0.2, dx=0.1, n=12)
    f = np.linspace(0.0, 1.0, 12)
    np.testing.assert_array_equal(solve_r1(ws, f), ws.solve(f))
    np.testing.assert_array_equal(apply_helmholtz(ws, f), ws.apply(f))
