"""Skeleton structure tau(s) and the quantum-skeleton random walk (QSRW).

``tau`` depends on the coin only through ``|a|`` (and ``|b| = sqrt(1-|a|^2)``)::

    tau(s) = (1 - s) / 2                                       |s| < |a|
             (1 -+ |a|) / 2                                    s = +-|a|
             (s - |a|^2 + |b| sqrt(s^2 - |a|^2)) / (2 s)       |a| < |s| < 1
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coin import CoinSpec
from .errors import DomainError
from .sampling import TrajectoryBatch, sample_walk

__all__ = ["PEAK_MATCH_RTOL", "SkeletonFn", "sample_qsrw", "around_peak_grid", "parity_site"]

PEAK_MATCH_RTOL = 1e-12


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")


@dataclass(frozen=True)
class SkeletonFn:
    abs_a: float
    abs_b: float

    def __post_init__(self):
        if not (0.0 < self.abs_a < 1.0 and 0.0 < self.abs_b < 1.0):
            raise DomainError("|a| and |b| must lie in (0, 1)")
        if abs(self.abs_a**2 + self.abs_b**2 - 1.0) > 1e-12:
            raise DomainError("|a|^2 + |b|^2 must equal 1")

    @classmethod
    def from_abs_a(cls, abs_a: float) -> "SkeletonFn":
        return cls(float(abs_a), math.sqrt(1.0 - float(abs_a) ** 2))

    @classmethod
    def from_coin(cls, coin: CoinSpec) -> "SkeletonFn":
        a = coin.abs_a
        return cls(a, math.sqrt(1.0 - a * a))

    def _at_peak(self, s: float) -> bool:
        return abs(abs(s) - self.abs_a) <= PEAK_MATCH_RTOL * self.abs_a

    def tau1(self, s: float) -> float:
        if not abs(s) < self.abs_a:
            raise DomainError(f"inside branch needs |s| < {self.abs_a}, got s={s}")
        return (1.0 - s) / 2.0

    def tau2(self, s: float) -> float:
        if not self.abs_a < abs(s) < 1.0:
            raise DomainError(f"outside branch needs {self.abs_a} < |s| < 1, got s={s}")
        return self._tau2_formula(s)

    def _tau2_formula(self, s):
        a2 = self.abs_a**2
        return (s - a2 + self.abs_b * np.sqrt(s * s - a2)) / (2.0 * s)

    def tau_circ(self, sign) -> float:
        return (1.0 - _sign(sign) * self.abs_a) / 2.0

    def tau(self, s: float) -> float:
        s = float(s)
        if not abs(s) < 1.0:
            raise DomainError(f"tau is defined on (-1, 1), got s={s}")
        if self._at_peak(s):
            return self.tau_circ(1 if s > 0 else -1)
        if abs(s) < self.abs_a:
            return self.tau1(s)
        return float(self._tau2_formula(s))

    def tau_array(self, s, *, closed: bool = False) -> np.ndarray:
        """Vectorised ``tau``.

        With ``closed=True`` the outside formula is also used at ``|s| = 1``
        (its value there is ``|b|^2`` at ``s = 1`` and ``|a|^2`` at ``s = -1``).
        """
        s = np.asarray(s, dtype=float)
        lim = np.abs(s) <= 1.0 if closed else np.abs(s) < 1.0
        if not np.all(lim):
            raise DomainError("s outside the domain of tau")
        out = np.empty_like(s)
        peak = np.abs(np.abs(s) - self.abs_a) <= PEAK_MATCH_RTOL * self.abs_a
        inside = (np.abs(s) < self.abs_a) & ~peak
        outside = ~inside & ~peak
        out[inside] = (1.0 - s[inside]) / 2.0
        out[peak] = (1.0 - np.sign(s[peak]) * self.abs_a) / 2.0
        with np.errstate(invalid="ignore", divide="ignore"):
            out[outside] = self._tau2_formula(s[outside])
        return out

    def left_prob_table(self, n: int) -> np.ndarray:
        """QSRW step-left probabilities on the sites reachable at time ``n``."""
        if n == 0:
            return np.array([0.5])
        x = np.arange(-n, n + 1, 2)
        return self.tau_array(x / n, closed=True)


def sample_qsrw(
    skeleton: SkeletonFn,
    horizon: int,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
    record_paths: bool = False,
) -> TrajectoryBatch:
    """Sample the walk that steps left from ``x`` at time ``n`` with probability ``tau(x/n)``."""
    table = [skeleton.left_prob_table(n) for n in range(horizon)]
    return sample_walk(table, horizon, trials, seed, threads=threads, record_paths=record_paths)


def parity_site(n: int, target: float, toward: int = 0) -> int:
    """Round ``target`` onto the reachable sublattice at time ``n``.

    A parity mismatch is fixed by moving one site toward the origin; at the
    origin itself the step goes in direction ``toward`` (default right).
    """
    x = int(round(target))
    x = max(-n, min(n, x))
    if (x - n) % 2:
        if x > 0:
            x -= 1
        elif x < 0:
            x += 1
        else:
            x = -1 if toward < 0 else 1
    return x


def around_peak_grid(horizon: int, sign, c: float = 0.0, abs_a: float = 1 / math.sqrt(2)) -> list[tuple[int, int]]:
    """Sites ``x_n = +-n|a| + c n^(1/3)`` for ``n = 0..horizon`` on the reachable lattice."""
    if c < 0:
        raise DomainError("c must be non-negative")
    sg = _sign(sign)
    return [(n, parity_site(n, sg * n * abs_a + c * n ** (1.0 / 3.0), sg)) for n in range(horizon + 1)]
