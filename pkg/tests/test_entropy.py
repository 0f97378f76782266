import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from eulerent.entropy import (ConvexFunction, delta_phi, entropy_identity_residual,
                              eos_pressure, eta, phi_e, phi_rho, phi_square, solve_xkl)
from eulerent.errors import ConsistencyError, DomainError

pos = st.floats(1e-3, 1e3, allow_nan=False)


def xkl_oracle(f, df, a, b):
    """Bisection in 50-digit arithmetic on the difference of the two tangents."""
    mpmath.mp.dps = 50
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        return float(lo)

    def g(x):
        return (f(lo) + df(lo) * (x - lo)) - (f(hi) + df(hi) * (x - hi))

    left, right = lo, hi
    for _ in range(200):
        mid = (left + right) / 2
        if g(left) * g(mid) <= 0:
            right = mid
        else:
            left = mid
    return float((left + right) / 2)


ORACLES = {
    "phi_rho": (lambda z: z * mpmath.log(z), lambda z: mpmath.log(z) + 1),
    "phi_e": (lambda z: -mpmath.log(z) / mpmath.mpf("0.4"),
              lambda z: -1 / (mpmath.mpf("0.4") * z)),
    "square": (lambda z: z * z, lambda z: 2 * z),
}


def test_phi_rho_values():
    f = phi_rho()
    assert f(1.0) == 0.0
    assert f(math.e) == pytest.approx(math.e, rel=1e-15)
    assert f.deriv(1.0) == 1.0
    assert f.second(2.0) == 0.5


def test_phi_e_values():
    f = phi_e(1.4)
    assert f(1.0) == 0.0
    assert f(math.e) == pytest.approx(-2.5, rel=1e-15)
    assert phi_e(2.0)(0.5) == pytest.approx(math.log(2), rel=1e-15)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        phi_rho()(bad)
    with pytest.raises(DomainError):
        phi_e(1.4).deriv(bad)


def test_gamma_must_exceed_one():
    with pytest.raises(DomainError):
        phi_e(1.0)
    with pytest.raises(DomainError):
        eos_pressure(1.0, 1.0, 0.9)


def test_eos_and_eta():
    assert eos_pressure(2.0, 3.0, 1.4) == pytest.approx(2.4, rel=1e-15)
    assert eta(math.e, 1.0, 2.0) == pytest.approx(math.e, rel=1e-15)
    assert eta(1.0, math.e, 2.0) == pytest.approx(-1.0, rel=1e-15)


@given(pos, pos, st.floats(1.01, 5.0))
def test_entropy_identity(rho, e, gamma):
    scale = 1 + abs(rho * math.log(rho)) + rho
    assert abs(entropy_identity_residual(rho, e, gamma)) <= 1e-13 * scale


def test_xkl_examples():
    assert solve_xkl(phi_square(), 1.0, 3.0) == 2.0
    assert solve_xkl(phi_rho(), 1.0, math.e) == pytest.approx(math.e - 1, rel=1e-15)
    assert solve_xkl(phi_rho(), 2.0, 2.0) == 2.0


@pytest.mark.parametrize("name", ["phi_rho", "phi_e", "square"])
@given(a=pos, b=pos)
def test_xkl_against_bisection(name, a, b):
    phi = {"phi_rho": phi_rho(), "phi_e": phi_e(1.4), "square": phi_square()}[name]
    x = solve_xkl(phi, a, b)
    assert min(a, b) <= x <= max(a, b)
    assert x == solve_xkl(phi, b, a)
    assert x == pytest.approx(xkl_oracle(*ORACLES[name], a, b), rel=1e-10, abs=0)


def test_xkl_generic_path_matches_closed_forms(rng):
    # strip the closed form to exercise the generic solve and its expansion
    for phi in (phi_rho(), phi_e(1.7)):
        generic = ConvexFunction(phi.value_fn, phi.deriv_fn, phi.second_fn, "generic")
        a = np.exp(rng.uniform(-2, 2, 500))
        b = a * np.exp(rng.choice([1e-9, 1e-5, 1e-3, 0.1, 1.0], 500))
        assert np.allclose(solve_xkl(generic, a, b), solve_xkl(phi, a, b), rtol=1e-10, atol=0)


def test_xkl_rejects_non_convex():
    wavy = ConvexFunction(np.sin, np.cos, lambda z: -np.sin(z), "sin")
    with pytest.raises(ConsistencyError):
        solve_xkl(wavy, 2.0, 5.0)


def test_delta_phi_example():
    mpmath.mp.dps = 40
    xkl = 1 / mpmath.log(2)
    f = lambda z: z * mpmath.log(z)
    df = lambda z: mpmath.log(z) + 1
    expected = f(1) - f(1) + df(1) * (xkl - 1) + (df(1) + df(2)) / 2 * (1 - xkl)
    value = delta_phi(phi_rho(), 1.0, 2.0, 1.0)
    assert value == pytest.approx(float(expected), rel=1e-13)
    assert value == pytest.approx(-0.15342641, abs=1e-8)


@given(pos, pos, st.floats(0.0, 1.0))
def test_delta_phi_symmetric(a, b, t):
    xs = min(a, b) + t * abs(b - a)
    assert delta_phi(phi_rho(), a, b, xs) == delta_phi(phi_rho(), b, a, xs)


@pytest.mark.parametrize("a, b", [(1.0, 3.0), (0.2, 5.0)])
def test_delta_phi_at_xkl_is_tangent_gap(a, b):
    # at x_sigma = x_KL only the common tangent value minus phi remains
    f = phi_rho()
    x = solve_xkl(f, a, b)
    tangent = f(a) + f.deriv(a) * (x - a)
    assert delta_phi(f, a, b, x) == pytest.approx(tangent - f(x), rel=1e-12)
    assert delta_phi(f, a, b, x) < 0


def test_bound_sups():
    f = phi_rho()
    assert f.deriv_sup(4.0) == pytest.approx(max(abs(math.log(0.25) + 1), math.log(4) + 1))
    assert f.second_sup(4.0) == 4.0
    assert phi_e(2.0).second_sup(2.0) == pytest.approx(4.0)
