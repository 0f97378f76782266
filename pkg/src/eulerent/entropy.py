"""
Entropy pair and convexity tools
--------------------------------

The entropy of a perfect gas written in (density, internal energy) variables
splits as

.. math::

    \\eta(\\rho, e) = \\varphi_\\rho(\\rho) + \\rho\\, \\varphi_e(e),
    \\qquad \\varphi_\\rho(z) = z \\log z,
    \\qquad \\varphi_e(z) = -\\frac{\\log z}{\\gamma - 1}.

Both functions are strictly convex on :math:`(0, \\infty)` and are chosen so
that :math:`\\rho \\varphi_\\rho'(\\rho) - \\varphi_\\rho(\\rho) + \\varphi_e'(e) p = 0`
for :math:`p = (\\gamma - 1)\\rho e`.

All functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConsistencyError, DomainError

#: Arguments at or below this value are rejected before taking logarithms.
DOMAIN_CUTOFF = 1.0e-300

# below this relative gap, x_KL is evaluated by its expansion around the midpoint
_XKL_TAYLOR_GAP = 1.0e-3
_XKL_RTOL = 1.0e-10


def _check_domain(z, what="argument"):
    z = np.asarray(z, dtype=np.float64)
    if np.any(~(z > DOMAIN_CUTOFF)):
        raise DomainError(f"{what} must be positive, got min {np.min(z)!r}")
    return z


def _out(z):
    return z.item() if np.ndim(z) == 0 else z


@dataclass(frozen=True)
class ConvexFunction:
    """A strictly convex function on (0, inf) with its first two derivatives.

    ``value``, ``deriv`` and ``second`` are called on positive float arrays;
    the domain check is done here, not by the callables.
    """

    value_fn: Callable[[np.ndarray], np.ndarray]
    deriv_fn: Callable[[np.ndarray], np.ndarray]
    second_fn: Callable[[np.ndarray], np.ndarray]
    name: str = "phi"
    #: optional closed form of the tangent intersection, ``(lo, hi) -> x``,
    #: called with ``0 < lo < hi``
    xkl_fn: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def eval(self, z):
        return _out(self.value_fn(_check_domain(z)))

    def deriv(self, z):
        return _out(self.deriv_fn(_check_domain(z)))

    def second(self, z):
        return _out(self.second_fn(_check_domain(z)))

    __call__ = eval

    def second_range(self, lo, hi):
        """Bounds ``(min, max)`` of ``second`` over ``[lo, hi]``.

        Taken from the endpoint values, which is exact when ``second`` is
        monotone on the interval (true for every function built here).
        """
        a, b = self.second(lo), self.second(hi)
        return np.minimum(a, b), np.maximum(a, b)

    def deriv_sup(self, m):
        """max(|phi'(1/m)|, |phi'(m)|), i.e. sup of |phi'| over [1/m, m]."""
        return float(max(abs(self.deriv(1.0 / m)), abs(self.deriv(m))))

    def second_sup(self, m):
        """Maximum of phi'' over [1/m, m]."""
        return float(self.second_range(1.0 / m, m)[1])


@dataclass(frozen=True)
class GasParameters:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must be > 1, got {self.gamma!r}")


def _as_gas(gas) -> GasParameters:
    if isinstance(gas, GasParameters):
        return gas
    return GasParameters(float(gas))


# {{{ entropy pair

def _log_mean(lo, hi):
    """(hi - lo) / log(hi / lo), accurate for nearby arguments."""
    gap = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        m = gap / np.log1p(gap / lo)
    return np.where(gap > 0, m, lo)


def phi_rho() -> ConvexFunction:
    """z log z."""
    return ConvexFunction(
        value_fn=lambda z: z * np.log(z),
        deriv_fn=lambda z: np.log(z) + 1.0,
        second_fn=lambda z: 1.0 / z,
        name="phi_rho",
        xkl_fn=_log_mean)


def phi_e(gas) -> ConvexFunction:
    """-log(z) / (gamma - 1)."""
    g1 = _as_gas(gas).gamma - 1.0
    return ConvexFunction(
        value_fn=lambda z: -np.log(z) / g1,
        deriv_fn=lambda z: -1.0 / (g1 * z),
        second_fn=lambda z: 1.0 / (g1 * z * z),
        name="phi_e",
        xkl_fn=lambda lo, hi: lo * hi / _log_mean(lo, hi))


def phi_square() -> ConvexFunction:
    """z**2; its tangent intersection is the arithmetic mean."""
    return ConvexFunction(
        value_fn=lambda z: z * z,
        deriv_fn=lambda z: 2.0 * z,
        second_fn=lambda z: np.full_like(z, 2.0),
        name="square",
        xkl_fn=lambda lo, hi: 0.5 * (lo + hi))


def eos_pressure(rho, e, gas):
    """Perfect gas law p = (gamma - 1) rho e."""
    gas = _as_gas(gas)
    rho = _check_domain(rho, "density")
    e = _check_domain(e, "internal energy")
    return _out((gas.gamma - 1.0) * rho * e)


def eta(rho, e, gas):
    """Entropy density phi_rho(rho) + rho phi_e(e)."""
    rho = _check_domain(rho, "density")
    e = _check_domain(e, "internal energy")
    return _out(phi_rho().value_fn(rho) + rho * phi_e(gas).value_fn(e))


def entropy_identity_residual(rho, e, gas):
    """rho phi_rho'(rho) - phi_rho(rho) + phi_e'(e) p, which vanishes identically."""
    gas = _as_gas(gas)
    rho = _check_domain(rho, "density")
    e = _check_domain(e, "internal energy")
    fr, fe = phi_rho(), phi_e(gas)
    p = (gas.gamma - 1.0) * rho * e
    return _out(rho * fr.deriv_fn(rho) - fr.value_fn(rho) + fe.deriv_fn(e) * p)

# }}}


# {{{ tangent intersection

def _xkl_generic(phi, lo, hi, gap, scale):
    fl, fh = phi.value_fn(lo), phi.value_fn(hi)
    dl, dh = phi.deriv_fn(lo), phi.deriv_fn(hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = (fh - fl + dl * lo - dh * hi) / (dl - dh)
    mid = 0.5 * (lo + hi)
    taylor = mid + 0.5 * gap * (phi.second_fn(hi) - phi.second_fn(lo)) / (6.0 * phi.second_fn(mid))
    near = (gap <= _XKL_TAYLOR_GAP * scale) | ~np.isfinite(closed)
    return np.where(near, taylor, closed)


def solve_xkl(phi: ConvexFunction, x_k, x_l):
    """Abscissa where the tangents of ``phi`` at ``x_k`` and ``x_l`` intersect.

    Functions carrying an ``xkl_fn`` use it (logarithmic mean for
    ``z log z``, midpoint for ``z^2``). Otherwise the tangent equation, which
    is linear in the unknown, is solved in closed form. For nearly equal arguments the closed form loses all accuracy to
    cancellation and the midpoint expansion

    .. math::

        x_{KL} \\approx m + \\frac{d\\, (\\varphi''(x_+) - \\varphi''(x_-))}{6\\,\\varphi''(m)},
        \\qquad m = \\frac{x_- + x_+}{2},\\ d = \\frac{x_+ - x_-}{2},

    is used instead (error of order d^4). The arguments are sorted first, so
    the result is exactly symmetric.

    :raises ConsistencyError: if the result falls outside ``[min, max]`` of the
        arguments by more than a relative 1e-10 (``phi`` is not convex).
    """
    xk = _check_domain(x_k)
    xl = _check_domain(x_l)
    lo, hi = np.broadcast_arrays(np.minimum(xk, xl), np.maximum(xk, xl))
    scale = np.maximum(np.abs(lo), np.abs(hi))
    gap = hi - lo

    if phi.xkl_fn is not None:
        x = phi.xkl_fn(lo, hi)
    else:
        x = _xkl_generic(phi, lo, hi, gap, scale)
    x = np.where(gap == 0, lo, x)

    tol = _XKL_RTOL * scale
    if np.any((x < lo - tol) | (x > hi + tol)) or not np.all(np.isfinite(x)):
        raise ConsistencyError(
            f"tangent intersection of {phi.name} outside [x_K, x_L]; "
            "is the function strictly convex?")
    return _out(np.clip(x, lo, hi))


def delta_phi(phi: ConvexFunction, x_k, x_l, x_sigma):
    """Conservative part of the face remainder.

    ``phi(x_K) - phi(x_s) + phi'(x_K)(x_KL - x_K)
    + (phi'(x_K) + phi'(x_L))(x_s - x_KL) / 2``, symmetric in ``(x_K, x_L)``.
    """
    xk = _check_domain(x_k)
    xl = _check_domain(x_l)
    xs = _check_domain(x_sigma)
    xkl = np.asarray(solve_xkl(phi, xk, xl))
    dk, dl = phi.deriv_fn(xk), phi.deriv_fn(xl)
    # phi(x_K) + phi'(x_K)(x_KL - x_K) is the common tangent value at x_KL;
    # averaging both sides keeps the expression exactly symmetric
    tangent = 0.5 * ((phi.value_fn(xk) + dk * (xkl - xk))
                     + (phi.value_fn(xl) + dl * (xkl - xl)))
    return _out(tangent - phi.value_fn(xs) + 0.5 * (dk + dl) * (xs - xkl))

# }}}
