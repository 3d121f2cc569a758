"""Coin matrix, its chirality decomposition and the walk-convention bridge.

The coin is the general 2x2 unitary with top row ``(a, b)`` and
determinant phase ``delta``::

    C = [[a, b], [-e^{i delta} conj(b), e^{i delta} conj(a)]]

``P`` keeps the top row of ``C`` (the left-moving branch) and ``Q`` the
bottom row, so ``P + Q = C``.  ``theta`` is the ``delta = 0`` member of the
same family and links the Ambainis (``U = SC``) and Gudder (``U' = CS``)
path weights.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateCoin, DeltaOutOfRange, DomainError, NonUnitary, ParityViolation

__all__ = [
    "KET_L",
    "KET_R",
    "UNITARY_TOL",
    "CoinSpec",
    "build_coin",
    "coin_from_reals",
    "hadamard",
    "ambainis_to_gudder_factor",
    "tilde_transform",
    "random_coin",
]

UNITARY_TOL = 1e-12
MIN_MODULUS = 1e-9

KET_L = np.array([1.0, 0.0], dtype=np.complex128)
KET_R = np.array([0.0, 1.0], dtype=np.complex128)
KET_L.flags.writeable = False
KET_R.flags.writeable = False


def _frozen(m: np.ndarray) -> np.ndarray:
    m.flags.writeable = False
    return m


@dataclass(frozen=True)
class CoinSpec:
    """Validated coin parameters.  Use :func:`build_coin` to construct."""

    a: complex
    b: complex
    delta: float

    @property
    def abs_a(self) -> float:
        return abs(self.a)

    @property
    def abs_b(self) -> float:
        return abs(self.b)

    @cached_property
    def C(self) -> np.ndarray:
        a, b = complex(self.a), complex(self.b)
        ph = cmath.exp(1j * self.delta)
        return _frozen(np.array([[a, b], [-ph * b.conjugate(), ph * a.conjugate()]], dtype=np.complex128))

    @cached_property
    def P(self) -> np.ndarray:
        m = np.zeros((2, 2), dtype=np.complex128)
        m[0] = self.C[0]
        return _frozen(m)

    @cached_property
    def Q(self) -> np.ndarray:
        m = np.zeros((2, 2), dtype=np.complex128)
        m[1] = self.C[1]
        return _frozen(m)

    @cached_property
    def theta(self) -> np.ndarray:
        a, b = complex(self.a), complex(self.b)
        return _frozen(np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=np.complex128))

    def with_delta(self, delta: float) -> "CoinSpec":
        return build_coin(self.a, self.b, delta)

    def as_reals(self) -> list[float]:
        """``[a_re, a_im, b_re, b_im, delta]``, the external representation."""
        a, b = complex(self.a), complex(self.b)
        return [a.real, a.imag, b.real, b.imag, float(self.delta)]


def build_coin(a: complex, b: complex, delta: float) -> CoinSpec:
    """Validate ``(a, b, delta)`` and return a :class:`CoinSpec`.

    Raises
    ------
    DegenerateCoin
        If ``|a|`` or ``|b|`` is below 1e-9.
    NonUnitary
        If ``|a|^2 + |b|^2`` differs from 1 by more than 1e-12.
    DeltaOutOfRange
        If ``delta`` is outside ``[-pi, pi)``.
    """
    a, b, delta = complex(a), complex(b), float(delta)
    if not all(math.isfinite(v) for v in (a.real, a.imag, b.real, b.imag, delta)):
        raise NonUnitary("coin parameters must be finite")
    if abs(a) < MIN_MODULUS or abs(b) < MIN_MODULUS:
        raise DegenerateCoin(f"a and b must both be nonzero (|a|={abs(a):.3g}, |b|={abs(b):.3g})")
    norm = abs(a) ** 2 + abs(b) ** 2
    if abs(norm - 1.0) > UNITARY_TOL:
        raise NonUnitary(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
    if not (-math.pi <= delta < math.pi):
        raise DeltaOutOfRange(f"delta = {delta!r} outside [-pi, pi)")
    return CoinSpec(a, b, delta)


def coin_from_reals(a_re: float, a_im: float, b_re: float, b_im: float, delta: float) -> CoinSpec:
    return build_coin(complex(a_re, a_im), complex(b_re, b_im), delta)


def hadamard() -> CoinSpec:
    """Hadamard coin ``(1/sqrt 2)[[1, 1], [1, -1]]`` (``delta = -pi``)."""
    r = 1.0 / math.sqrt(2.0)
    return build_coin(r, r, -math.pi)


def ambainis_to_gudder_factor(n: int, x: int, delta: float) -> complex:
    """Phase ``e^{i delta (n + x)/2}`` relating Ambainis and Gudder path weights."""
    if n < 0 or abs(x) > n:
        raise DomainError(f"site x={x} not reachable at n={n}")
    if (n - x) % 2:
        raise ParityViolation(f"x={x} and n={n} have different parity")
    return cmath.exp(1j * delta * ((n + x) // 2))


def tilde_transform(coin: CoinSpec, v) -> np.ndarray:
    """Return ``theta @ v``; norm preserving."""
    return coin.theta @ np.asarray(v, dtype=np.complex128)


def random_coin(rng: np.random.Generator, abs_a_range: tuple[float, float] = (0.05, 0.95)) -> CoinSpec:
    """Coin with ``|a|`` uniform in ``abs_a_range`` and uniform phases and ``delta``."""
    r = rng.uniform(*abs_a_range)
    pa, pb = rng.uniform(-math.pi, math.pi, size=2)
    delta = rng.uniform(-math.pi, math.pi)
    return build_coin(r * cmath.exp(1j * pa), math.sqrt(1.0 - r * r) * cmath.exp(1j * pb), delta)
