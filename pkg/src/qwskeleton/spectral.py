"""Spectral helpers and oscillatory-integral checks.

The phase function ``theta(s)`` on ``[-|a|, |a|]`` is handled through the
substitution ``t = k(s)``, ``s = sigma(t)``, under which
``2 theta(sigma(t)) = rho(t)`` and every piece is smooth on
``[-pi/2, pi/2]``.  Useful identities: ``d theta/ds = -k(s)`` and
``rho'(t) = -2 t sigma'(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coin import CoinSpec
from .errors import DegenerateVector, DomainError, EmptyWindow, QuadratureFailure
from .engine import WalkState, run_walk
from .qwrw import TransitionField, transition_field

__all__ = [
    "SpectralVectors",
    "PhaseFunctions",
    "OscIntegral",
    "h_of",
    "uv_of",
    "osc_integral",
    "weak_residual",
    "weak_residual_from_field",
    "mass_weighted_residual",
]

QUAD_NODES = 24
QUAD_FAIL = 1e-6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(QUAD_NODES)


def h_of(z_angle, abs_a: float):
    """``|a| cos(arg z) + i sqrt(1 - |a|^2 cos^2(arg z))``; unit modulus, Im >= 0."""
    c = abs_a * np.cos(z_angle)
    return c + 1j * np.sqrt(np.maximum(1.0 - c * c, 0.0))


@dataclass(frozen=True)
class SpectralVectors:
    z_angle: float
    u: np.ndarray
    v: np.ndarray
    h: complex
    N: float


def uv_of(z_angle: float, coin: CoinSpec) -> SpectralVectors:
    """Normalised ``u(z)`` and its partner ``v(z) = (-conj(u_R), conj(u_L))``."""
    a, b = complex(coin.a), complex(coin.b)
    abs_a = abs(a)
    z = np.exp(1j * z_angle)
    h = complex(h_of(z_angle, abs_a))
    u_raw = np.array([a * b * z / abs_a, h - abs_a * np.conj(z)], dtype=np.complex128)
    v_raw = np.array([-np.conj(h) + abs_a * z, np.conj(a * b * z) / abs_a], dtype=np.complex128)
    N = float(np.linalg.norm(u_raw))
    if N < 1e-12:
        raise DegenerateVector(f"u(z) vanishes at arg z = {z_angle}")
    return SpectralVectors(float(z_angle), u_raw / N, v_raw / N, h, N)


@dataclass(frozen=True)
class PhaseFunctions:
    abs_a: float
    abs_b: float

    @classmethod
    def from_abs_a(cls, abs_a: float) -> "PhaseFunctions":
        return cls(float(abs_a), math.sqrt(1.0 - float(abs_a) ** 2))

    @classmethod
    def from_coin(cls, coin: CoinSpec) -> "PhaseFunctions":
        return cls.from_abs_a(coin.abs_a)

    def _check_s(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if np.any(np.abs(s) > self.abs_a * (1 + 1e-12)):
            raise DomainError(f"need |s| <= |a| = {self.abs_a}")
        return s

    def k(self, s):
        s = self._check_s(s)
        arg = s * self.abs_b / (self.abs_a * np.sqrt(1.0 - s * s))
        return np.arcsin(np.clip(arg, -1.0, 1.0))

    def sigma(self, t):
        st = np.sin(t)
        return st / np.sqrt((self.abs_b / self.abs_a) ** 2 + st * st)

    def dsigma(self, t):
        beta2 = (self.abs_b / self.abs_a) ** 2
        return np.cos(t) * beta2 / (beta2 + np.sin(t) ** 2) ** 1.5

    def rho(self, t):
        return 2.0 * (np.arccos(self.abs_a * np.cos(t)) - t * self.sigma(t))

    def drho(self, t):
        return -2.0 * t * self.dsigma(t)

    def theta(self, s):
        t = self.k(s)
        return np.arccos(self.abs_a * np.cos(t)) - t * self._check_s(s)


@dataclass(frozen=True)
class OscIntegral:
    y: float
    n: int
    sign: int
    value: complex
    err_est: float
    nodes: int


def _panel_rule(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return t, w


def _call_F(F: Callable, s: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(F(s), dtype=np.complex128)
    except (TypeError, ValueError):
        out = np.array([F(float(v)) for v in s], dtype=np.complex128)
    return np.broadcast_to(out, s.shape)


def osc_integral(F: Callable, y: float, n: int, sign: int, abs_a: float) -> OscIntegral:
    """Integral of ``F(s) exp(sign * 2i n theta(s))`` over ``[-|a|, y]``.

    Evaluated in the ``t`` variable with composite Gauss-Legendre panels, one
    panel per oscillation period at most (24 nodes per period).  The error
    estimate is the change when the panel count is doubled.

    Raises
    ------
    QuadratureFailure
        If the error estimate exceeds 1e-6.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if n < 1:
        raise DomainError("n must be >= 1")
    ph = PhaseFunctions.from_abs_a(abs_a)
    if not -abs_a <= y <= abs_a:
        raise DomainError(f"y must lie in [-|a|, |a|], got {y}")
    if y == -abs_a:
        return OscIntegral(y, n, sign, 0j, 0.0, 0)
    lo, hi = -math.pi / 2, float(ph.k(y))
    span = abs(float(ph.rho(hi) - ph.rho(lo)))
    # rho is not monotone on the whole range; bound its total variation by the
    # largest slope times the interval length.
    tt = np.linspace(lo, hi, 257)
    variation = max(span, float(np.max(np.abs(ph.drho(tt)))) * (hi - lo))
    panels = max(8, int(math.ceil(n * variation / (2 * math.pi))) + 1)

    def rule(m: int) -> complex:
        t, w = _panel_rule(lo, hi, m)
        f = _call_F(F, ph.sigma(t))
        return complex(np.sum(w * f * np.exp(1j * sign * n * ph.rho(t)) * ph.dsigma(t)))

    coarse = rule(panels)
    fine = rule(2 * panels)
    err = abs(fine - coarse)
    if err > QUAD_FAIL:
        raise QuadratureFailure(f"error estimate {err:.3g} at n={n}")
    return OscIntegral(float(y), int(n), sign, fine, err, 2 * panels * QUAD_NODES)


def weak_residual_from_field(
    field: TransitionField,
    abs_a: float,
    window: tuple[float, float],
    g: Callable = None,
) -> float:
    """Midpoint sum of ``(p_n(x) - (1 - x/n)/2) g(x/n) * 2/n`` over sites with ``x/n`` in the window."""
    lo, hi = window
    if not (-abs_a < lo <= hi < abs_a):
        raise DomainError(f"window must lie inside (-|a|, |a|), got {window}")
    n = field.n
    if n == 0:
        raise EmptyWindow("n = 0 has no lattice spacing")
    s = field.positions / n
    mask = (s >= lo) & (s <= hi) & field.defined
    if not mask.any():
        raise EmptyWindow(f"no reachable site with x/n in [{lo}, {hi}] at n={n}")
    s = s[mask]
    gv = np.ones_like(s) if g is None else np.broadcast_to(np.asarray(g(s), dtype=float), s.shape)
    return float(np.sum((field.p[mask] - (1.0 - s) / 2.0) * gv) * (2.0 / n))


def weak_residual(
    coin: CoinSpec,
    phi,
    n: int,
    window: tuple[float, float],
    g: Callable = None,
) -> float:
    field = transition_field(run_walk(coin, phi, n), coin)
    return weak_residual_from_field(field, coin.abs_a, window, g)


def mass_weighted_residual(
    state: WalkState,
    field: TransitionField,
    abs_a: float,
    window: tuple[float, float],
    g: Callable = None,
) -> float:
    """``sum mu_n(x) (p_n(x) - (1 - x/n)/2) g(x/n)`` over the window.

    Equal to ``sum (||P Psi_n(x)||^2 - tau_1 mu_n(x)) g``, which is linear in
    the numerator and denominator of ``p_n``.  Unlike the plain residual it
    tends to zero for every window and initial state.
    """
    lo, hi = window
    if not (-abs_a < lo <= hi < abs_a):
        raise DomainError(f"window must lie inside (-|a|, |a|), got {window}")
    if state.n != field.n or state.n == 0:
        raise EmptyWindow("state and field must share a time n >= 1")
    s = state.positions / state.n
    mask = (s >= lo) & (s <= hi) & field.defined
    if not mask.any():
        raise EmptyWindow(f"no reachable site with x/n in [{lo}, {hi}] at n={state.n}")
    s = s[mask]
    gv = np.ones_like(s) if g is None else np.broadcast_to(np.asarray(g(s), dtype=float), s.shape)
    return float(np.sum(state.mu[mask] * (field.p[mask] - (1.0 - s) / 2.0) * gv))
