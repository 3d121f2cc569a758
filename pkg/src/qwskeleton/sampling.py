"""Seeded Monte Carlo sampler shared by the QWRW and QSRW.

Trajectories are split into fixed-size blocks.  Block ``k`` draws from a
Philox generator keyed by ``(seed, k)``, so a run is reproducible bit for
bit no matter how many worker threads process the blocks.  Histograms are
merged by integer addition.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, UndefinedTransitionReached

__all__ = ["BLOCK_SIZE", "TrajectoryBatch", "block_generator", "sample_walk", "total_variation"]

BLOCK_SIZE = 1 << 16
MAX_SEED = (1 << 64) - 1


@dataclass
class TrajectoryBatch:
    """Endpoint histogram (and optionally full paths) of sampled walks.

    ``counts[j]`` is the number of trajectories that ended on
    ``x = -horizon + 2j``.  ``paths``, when recorded, has shape
    ``(trials, horizon + 1)`` and holds positions.
    """

    trials: int
    horizon: int
    seed: int
    counts: np.ndarray
    paths: np.ndarray | None = field(default=None, repr=False)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.horizon, self.horizon + 1, 2)

    @property
    def endpoints(self) -> dict[int, int]:
        return {int(x): int(c) for x, c in zip(self.positions, self.counts)}

    def frequencies(self) -> np.ndarray:
        if self.trials == 0:
            return np.zeros(len(self.counts))
        return self.counts / self.trials

    def nonzero_endpoints(self) -> dict[int, int]:
        return {x: c for x, c in self.endpoints.items() if c}


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _run_block(
    left_prob: Callable[[int], np.ndarray],
    undefined: Callable[[int], np.ndarray | None],
    horizon: int,
    size: int,
    rng: np.random.Generator,
    record_paths: bool,
) -> tuple[np.ndarray, np.ndarray | None]:
    j = np.zeros(size, dtype=np.int64)
    paths = np.zeros((size, horizon + 1), dtype=np.int64) if record_paths else None
    for n in range(horizon):
        bad = undefined(n)
        if bad is not None and bad[j].any():
            x = int(2 * j[bad[j]][0] - n)
            raise UndefinedTransitionReached(f"walker reached undefined site x={x} at n={n}")
        u = rng.random(size)
        j += u >= left_prob(n)[j]
        if paths is not None:
            paths[:, n + 1] = 2 * j - (n + 1)
    return np.bincount(j, minlength=horizon + 1), paths


def sample_walk(
    left_prob: Callable[[int], np.ndarray] | Sequence[np.ndarray],
    horizon: int,
    trials: int,
    seed: int,
    *,
    undefined: Callable[[int], np.ndarray | None] | None = None,
    threads: int = 1,
    record_paths: bool = False,
) -> TrajectoryBatch:
    """Sample ``trials`` walks of ``horizon`` steps from the origin.

    ``left_prob(n)`` gives, for every site index ``j`` at time ``n``, the
    probability of stepping to ``x - 1``.  ``undefined(n)``, if given, is a
    boolean mask of sites that a walker must never occupy.
    """
    if horizon < 0:
        raise DomainError("horizon must be non-negative")
    if trials < 0:
        raise DomainError("trials must be non-negative")
    seed = _check_seed(seed)
    if not callable(left_prob):
        table = left_prob
        left_prob = lambda n: table[n]  # noqa: E731
    if undefined is None:
        undefined = lambda n: None  # noqa: E731

    sizes = [BLOCK_SIZE] * (trials // BLOCK_SIZE)
    if trials % BLOCK_SIZE:
        sizes.append(trials % BLOCK_SIZE)

    def work(k: int):
        return _run_block(left_prob, undefined, horizon, sizes[k], block_generator(seed, k), record_paths)

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(len(sizes))))
    else:
        results = [work(k) for k in range(len(sizes))]

    counts = np.zeros(horizon + 1, dtype=np.int64)
    for c, _ in results:
        counts += c
    paths = None
    if record_paths:
        paths = (
            np.concatenate([p for _, p in results])
            if results
            else np.zeros((0, horizon + 1), dtype=np.int64)
        )
    return TrajectoryBatch(trials, horizon, seed, counts, paths)


def total_variation(counts: np.ndarray, probs: np.ndarray) -> float:
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total == 0:
        raise DomainError("empty histogram")
    return 0.5 * float(np.abs(counts / total - np.asarray(probs)).sum())
