"""Exact amplitude evolution of the one-dimensional two-state quantum walk.

Amplitudes at time ``n`` live on the reachable sites ``x = -n, -n+2, ..., n``
and are stored densely as an ``(n + 1, 2)`` complex array whose row ``j``
belongs to ``x = -n + 2j``.  The left chirality moves to ``x - 1`` and the
right chirality to ``x + 1``.

Two orderings of coin and shift are supported:

* ``"A"`` (Ambainis, ``U = SC``): ``Psi'(x) = P Psi(x+1) + Q Psi(x-1)``
* ``"G"`` (Gudder, ``U' = CS``): shift first, then ``C`` site-wise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .coin import CoinSpec, ambainis_to_gudder_factor
from .errors import DomainError, InvalidInitialState, ParityViolation

__all__ = [
    "AMBAINIS",
    "GUDDER",
    "UNDERFLOW_FLOOR",
    "WalkState",
    "PathWeights",
    "initial_state",
    "evolve",
    "iter_walk",
    "run_walk",
    "path_weight",
    "distribution",
    "summary",
    "site_index",
    "lemma_tf_deviation",
]

AMBAINIS = "A"
GUDDER = "G"
_CONVENTIONS = (AMBAINIS, GUDDER)

# mu_n(x) below this is treated as numerically zero (0/0 in ratios).
UNDERFLOW_FLOOR = 1e-300
PHI_NORM_TOL = 1e-12


def site_index(n: int, x: int) -> int:
    """Row of site ``x`` in the dense time-``n`` array."""
    if n < 0 or abs(x) > n:
        raise DomainError(f"site x={x} not reachable at n={n}")
    if (n - x) % 2:
        raise ParityViolation(f"x={x} and n={n} have different parity")
    return (x + n) // 2


@dataclass(frozen=True)
class WalkState:
    n: int
    amplitudes: np.ndarray
    convention: str = AMBAINIS

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1, 2)

    @property
    def mu(self) -> np.ndarray:
        a = self.amplitudes
        return np.sum(a.real**2 + a.imag**2, axis=1)

    def at(self, x: int) -> np.ndarray:
        return self.amplitudes[site_index(self.n, x)]

    def total_norm(self) -> float:
        return float(self.mu.sum())


def _check_convention(convention: str) -> str:
    if convention not in _CONVENTIONS:
        raise ValueError(f"unknown walk convention {convention!r}; expected 'A' or 'G'")
    return convention


def initial_state(phi, convention: str = AMBAINIS) -> WalkState:
    """State at ``n = 0`` concentrated on the origin with chirality ``phi``."""
    phi = np.asarray(phi, dtype=np.complex128).reshape(2)
    norm = float(np.linalg.norm(phi))
    if not np.isfinite(norm) or abs(norm - 1.0) > PHI_NORM_TOL:
        raise InvalidInitialState(f"initial state must have unit norm, got {norm!r}")
    return WalkState(0, phi.reshape(1, 2).copy(), _check_convention(convention))


def _step(amp: np.ndarray, coin: CoinSpec, convention: str) -> np.ndarray:
    # amp has shape (m, 2, ...) so that the same code steps vectors and matrices.
    m = amp.shape[0]
    out = np.zeros((m + 1,) + amp.shape[1:], dtype=np.complex128)
    C = coin.C
    if amp.ndim == 2:
        left, right = amp[:, 0], amp[:, 1]
        if convention == AMBAINIS:
            out[:m, 0] = C[0, 0] * left + C[0, 1] * right
            out[1:, 1] = C[1, 0] * left + C[1, 1] * right
        else:
            out[:m, 0] = left
            out[1:, 1] = right
            l2, r2 = out[:, 0].copy(), out[:, 1].copy()
            out[:, 0] = C[0, 0] * l2 + C[0, 1] * r2
            out[:, 1] = C[1, 0] * l2 + C[1, 1] * r2
        return out
    if convention == AMBAINIS:
        # Row j of the new array receives P*old[j] (from x+1) and Q*old[j-1] (from x-1).
        top = np.tensordot(C[0], amp, axes=([0], [1]))
        bottom = np.tensordot(C[1], amp, axes=([0], [1]))
        out[:m, 0] += top
        out[1:, 1] += bottom
    else:
        shifted = np.zeros_like(out)
        shifted[:m, 0] = amp[:, 0]
        shifted[1:, 1] = amp[:, 1]
        out = np.moveaxis(np.tensordot(C, shifted, axes=([1], [1])), 0, 1)
    return out


def evolve(state: WalkState, coin: CoinSpec) -> WalkState:
    """Advance ``state`` by one step in its own convention."""
    return WalkState(state.n + 1, _step(state.amplitudes, coin, state.convention), state.convention)


def iter_walk(coin: CoinSpec, phi, steps: int, convention: str = AMBAINIS) -> Iterator[WalkState]:
    """Yield the states at ``n = 0, 1, ..., steps``."""
    if steps < 0:
        raise DomainError("steps must be non-negative")
    state = initial_state(phi, convention)
    yield state
    for _ in range(steps):
        state = evolve(state, coin)
        yield state


def run_walk(coin: CoinSpec, phi, steps: int, convention: str = AMBAINIS) -> WalkState:
    state = None
    for state in iter_walk(coin, phi, steps, convention):
        pass
    return state


@dataclass(frozen=True)
class PathWeights:
    """Summed path amplitudes ``Xi_n(x)`` (2x2 per site) from the origin."""

    n: int
    xi: np.ndarray
    walk_type: str
    delta: float

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1, 2)

    def __getitem__(self, x: int) -> np.ndarray:
        return self.xi[site_index(self.n, x)]

    def as_dict(self) -> dict[int, np.ndarray]:
        return {int(x): m for x, m in zip(self.positions, self.xi)}

    def apply(self, phi) -> np.ndarray:
        """Amplitudes ``Xi_n(x) phi`` for every site, shape ``(n + 1, 2)``."""
        return self.xi @ np.asarray(phi, dtype=np.complex128)


def path_weight(n: int, coin: CoinSpec, walk_type: str = AMBAINIS) -> PathWeights:
    """Matrix-valued evolution started from the identity at the origin."""
    if n < 0:
        raise DomainError("n must be non-negative")
    _check_convention(walk_type)
    xi = np.eye(2, dtype=np.complex128).reshape(1, 2, 2)
    for _ in range(n):
        xi = _step(xi, coin, walk_type)
    return PathWeights(n, xi, walk_type, coin.delta)


def distribution(state: WalkState) -> dict[int, float]:
    """``{x: mu_n(x)}`` over the reachable sites."""
    return {int(x): float(m) for x, m in zip(state.positions, state.mu)}


def summary(state: WalkState) -> dict:
    x = state.positions.astype(float)
    mu = state.mu
    mean = float(np.dot(x, mu))
    var = float(np.dot((x - mean) ** 2, mu))
    argmax = _local_argmax_pair(state.positions, mu)
    return {"n": state.n, "mean": mean, "variance": var, "argmax_positions": argmax}


def _local_argmax_pair(x: np.ndarray, mu: np.ndarray) -> list[int]:
    """Argmax of ``mu`` over ``x < 0`` and over ``x > 0`` (``[0]`` when ``n = 0``)."""
    if len(x) == 1:
        return [int(x[0])]
    return [int(x[mask][np.argmax(mu[mask])]) for mask in (x < 0, x > 0)]


def lemma_tf_deviation(coin: CoinSpec, n_max: int) -> float:
    """Largest entry-wise gap between the Ambainis path weights and the
    rephased, conjugated ``delta = 0`` Gudder ones over ``n <= n_max``."""
    theta = coin.theta
    gudder0 = coin.with_delta(0.0)
    xa = np.eye(2, dtype=np.complex128).reshape(1, 2, 2)
    xg = xa.copy()
    worst = 0.0
    for n in range(n_max + 1):
        if n:
            xa = _step(xa, coin, AMBAINIS)
            xg = _step(xg, gudder0, GUDDER)
        phase = np.array([ambainis_to_gudder_factor(n, int(x), coin.delta) for x in range(-n, n + 1, 2)])
        rhs = phase[:, None, None] * (theta.conj().T @ xg @ theta)
        worst = max(worst, float(np.max(np.abs(xa - rhs))))
    return worst
