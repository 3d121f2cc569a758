"""Quantum-walk-replicating random walk (QWRW).

At time ``n`` a walker on site ``x`` steps left with probability
``p_n(x) = |<L|C Psi_n(x)>|^2 / mu_n(x)`` and right with
``q_n(x) = |<R|C Psi_n(x)>|^2 / mu_n(x)``.  The resulting classical walk has
the same position marginals as the quantum walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coin import KET_L, KET_R, CoinSpec
from .engine import AMBAINIS, GUDDER, UNDERFLOW_FLOOR, WalkState, iter_walk, path_weight, site_index
from .errors import UndefinedTransitionReached
from .sampling import TrajectoryBatch, sample_walk

__all__ = [
    "MASS_TOL",
    "TransitionField",
    "transition_field",
    "transition_fields",
    "path_weight_transition",
    "path_weight_transition_field",
    "qwrw_marginal",
    "sample_qwrw",
]

# Mass on an undefined site above this is an error in the exact marginal.
MASS_TOL = 1e-12


@dataclass(frozen=True)
class TransitionField:
    """Left/right probabilities on the sites reachable at time ``n``.

    Where ``mu_n(x)`` is zero or below the underflow floor the entry is
    marked ``defined = False`` and ``p = q = 0.5`` is stored as a placeholder.
    """

    n: int
    p: np.ndarray
    q: np.ndarray
    defined: np.ndarray

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1, 2)

    def at(self, x: int) -> tuple[float, float, bool]:
        j = site_index(self.n, x)
        return float(self.p[j]), float(self.q[j]), bool(self.defined[j])


def _field_from_amplitudes(n: int, amp: np.ndarray, coin: CoinSpec) -> TransitionField:
    mu = np.sum(amp.real**2 + amp.imag**2, axis=1)
    left = np.abs(amp @ coin.C[0]) ** 2
    right = np.abs(amp @ coin.C[1]) ** 2
    defined = mu >= UNDERFLOW_FLOOR
    safe = np.where(defined, mu, 1.0)
    p = np.where(defined, left / safe, 0.5)
    q = np.where(defined, right / safe, 0.5)
    return TransitionField(n, p, q, defined)


def transition_field(state: WalkState, coin: CoinSpec) -> TransitionField:
    if state.convention != AMBAINIS:
        raise ValueError("transition probabilities are defined for the Ambainis walk")
    return _field_from_amplitudes(state.n, state.amplitudes, coin)


def transition_fields(coin: CoinSpec, phi, horizon: int) -> list[TransitionField]:
    """Fields for ``n = 0, ..., horizon - 1`` (everything a ``horizon``-step walk needs)."""
    fields = []
    for state in iter_walk(coin, phi, max(horizon - 1, 0)):
        if state.n >= horizon:
            break
        fields.append(transition_field(state, coin))
    return fields


def path_weight_transition_field(n: int, coin: CoinSpec, phi) -> TransitionField:
    """Transition field computed through the ``delta = 0`` Gudder path weights.

    Uses ``p = |<L|Xi phi~>|^2 / (|<L~|Xi phi~>|^2 + |<R~|Xi phi~>|^2)`` with
    ``|v~> = theta|v>``; the determinant phase of the coin drops out.
    """
    xi = path_weight(n, coin.with_delta(0.0), GUDDER).xi
    theta = coin.theta
    w = xi @ (theta @ np.asarray(phi, dtype=np.complex128))
    left_t = theta @ KET_L
    right_t = theta @ KET_R
    num_p = np.abs(w[:, 0]) ** 2
    num_q = np.abs(w[:, 1]) ** 2
    den = np.abs(w @ left_t.conj()) ** 2 + np.abs(w @ right_t.conj()) ** 2
    defined = den >= UNDERFLOW_FLOOR
    safe = np.where(defined, den, 1.0)
    return TransitionField(
        n,
        np.where(defined, num_p / safe, 0.5),
        np.where(defined, num_q / safe, 0.5),
        defined,
    )


def path_weight_transition(n: int, x: int, coin: CoinSpec, phi) -> tuple[float, float]:
    j = site_index(n, x)
    field = path_weight_transition_field(n, coin, phi)
    return float(field.p[j]), float(field.q[j])


def qwrw_marginal(coin: CoinSpec, phi, horizon: int) -> list[np.ndarray]:
    """Exact position distributions ``nu_0, ..., nu_horizon`` of the QWRW.

    ``nu_{n+1}(x) = p_n(x+1) nu_n(x+1) + q_n(x-1) nu_n(x-1)``; array ``k`` is
    indexed like the quantum walk at time ``k``.
    """
    nu = np.ones(1)
    out = [nu]
    for field in transition_fields(coin, phi, horizon):
        stuck = np.where(~field.defined & (nu > MASS_TOL))[0]
        if stuck.size:
            x = int(2 * stuck[0] - field.n)
            raise UndefinedTransitionReached(
                f"mass {nu[stuck[0]]:.3g} on undefined site x={x} at n={field.n}"
            )
        nxt = np.zeros(field.n + 2)
        nxt[:-1] += field.p * nu
        nxt[1:] += field.q * nu
        nu = nxt
        out.append(nu)
    return out


def sample_qwrw(
    coin: CoinSpec,
    phi,
    horizon: int,
    trials: int,
    seed: int,
    *,
    threads: int = 1,
    record_paths: bool = False,
    fields: list[TransitionField] | None = None,
) -> TrajectoryBatch:
    """Monte Carlo QWRW trajectories; deterministic given ``seed``."""
    if fields is None:
        fields = transition_fields(coin, phi, horizon)
    p_table = [f.p for f in fields]
    bad_table = [None if f.defined.all() else ~f.defined for f in fields]
    return sample_walk(
        p_table,
        horizon,
        trials,
        seed,
        undefined=lambda n: bad_table[n],
        threads=threads,
        record_paths=record_paths,
    )
