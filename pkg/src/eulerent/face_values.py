"""
Face values for the convection fluxes
-------------------------------------

Three strategies are available, selected by name:

``"upwind"``
    value of the upwind cell, ``x_K`` if ``u_{K,sigma} >= 0`` else ``x_L``;
``"centered"``
    arithmetic mean ``(x_K + x_L) / 2``, no admissibility guarantee;
``"limited"``
    a candidate (centered by default) clamped into the admissible interval
    between the upwind value and the tangent intersection ``x_KL`` of the
    entropy function, which is what makes the face remainder split into a
    non-negative part and a conservative part.

All routines broadcast over numpy arrays of faces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .entropy import ConvexFunction, solve_xkl
from .errors import ConfigError

STRATEGIES = ("upwind", "centered", "limited")


def _centered(x_k, x_l):
    return 0.5 * (x_k + x_l)


@dataclass(frozen=True)
class FaceStrategy:
    kind: str = "upwind"
    #: candidate reconstruction for ``"limited"``, ``(x_K, x_L) -> value``
    candidate: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ConfigError(
                f"unknown face strategy {self.kind!r}; expected one of {STRATEGIES}")

    @classmethod
    def from_name(cls, name) -> "FaceStrategy":
        if isinstance(name, FaceStrategy):
            return name
        return cls(str(name).strip().lower())

    @property
    def satisfies_hypothesis(self) -> bool:
        """Whether emitted values always lie in the admissible interval."""
        return self.kind in ("upwind", "limited")


@dataclass(frozen=True)
class FaceValueRecord:
    """Face values with the admissible interval they were checked against.

    For the centered strategy the interval is empty (``nan`` bounds).
    ``upwind_first`` is true where the first cell of the pair is upwind.
    """

    x_sigma: np.ndarray
    interval_lo: np.ndarray
    interval_hi: np.ndarray
    upwind_first: np.ndarray

    def contains(self, atol=0.0):
        return (self.interval_lo - atol <= self.x_sigma) & (self.x_sigma <= self.interval_hi + atol)


def admissible_interval(phi: ConvexFunction, x_k, x_l, u_sign):
    """``[min, max]`` of ``(x_K, x_KL)`` if ``u_sign >= 0``, else of ``(x_L, x_KL)``."""
    x_k = np.asarray(x_k, dtype=np.float64)
    x_l = np.asarray(x_l, dtype=np.float64)
    xkl = np.asarray(solve_xkl(phi, x_k, x_l))
    up = np.where(np.asarray(u_sign) >= 0, x_k, x_l)
    lo, hi = np.minimum(up, xkl), np.maximum(up, xkl)
    if lo.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


def face_value(strategy, phi: ConvexFunction, x_k, x_l, u_ksigma) -> FaceValueRecord:
    """Face value(s) on interior faces, seen from cell ``K``.

    Boundary faces never reach this function: the normal velocity vanishes
    there, and so does the flux.
    """
    strategy = FaceStrategy.from_name(strategy)
    x_k = np.asarray(x_k, dtype=np.float64)
    x_l = np.asarray(x_l, dtype=np.float64)
    first = np.asarray(u_ksigma) >= 0
    first = np.broadcast_to(first, np.broadcast(x_k, x_l).shape)

    if strategy.kind == "upwind":
        x = np.where(first, x_k, x_l)
        lo = hi = x
    elif strategy.kind == "centered":
        x = _centered(x_k, x_l)
        lo = hi = np.full_like(x, np.nan)
    else:
        lo, hi = admissible_interval(phi, x_k, x_l, np.where(first, 1.0, -1.0))
        candidate = strategy.candidate or _centered
        x = np.clip(candidate(x_k, x_l), lo, hi)

    x, lo, hi = np.broadcast_arrays(x, lo, hi)
    return FaceValueRecord(x_sigma=x, interval_lo=lo, interval_hi=hi,
                           upwind_first=np.asarray(first))


def mass_flux(face_measure, rho_sigma, u_ksigma):
    """F_{K,sigma} = |sigma| rho_sigma u_{K,sigma}."""
    out = np.asarray(face_measure) * np.asarray(rho_sigma) * np.asarray(u_ksigma)
    return out.item() if out.ndim == 0 else out


def mesh_face_values(mesh, strategy, phi, cell_values, u_face) -> FaceValueRecord:
    """Face values on every face of ``mesh``, oriented along ``face_normal``.

    Returned arrays have length ``mesh.n_faces``; on boundary faces the own
    cell value is used (it never enters a flux since ``u`` vanishes there).
    """
    cell_values = np.asarray(cell_values)
    c0 = mesh.face_cells[:, 0]
    c1 = np.where(mesh.interior, mesh.face_cells[:, 1], c0)
    rec = face_value(strategy, phi, cell_values[c0], cell_values[c1], u_face)
    bnd = mesh.boundary
    if np.any(bnd):
        own = cell_values[c0]
        rec = FaceValueRecord(
            x_sigma=np.where(bnd, own, rec.x_sigma),
            interval_lo=np.where(bnd, own, rec.interval_lo),
            interval_hi=np.where(bnd, own, rec.interval_hi),
            upwind_first=np.where(bnd, True, rec.upwind_first))
    return rec
