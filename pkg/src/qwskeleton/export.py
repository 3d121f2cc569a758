"""CSV and JSON serialisation for walk data.

Floats are written with 17 significant digits so that files round-trip
exactly and reruns are byte-identical.
"""

from __future__ import annotations

import io
from typing import Iterable, Sequence

import numpy as np

from .engine import WalkState
from .qwrw import TransitionField
from .sampling import TrajectoryBatch
from .skeleton import SkeletonFn


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def distribution_csv(state: WalkState) -> str:
    return to_csv(["n", "x", "mu"], ((state.n, x, m) for x, m in zip(state.positions, state.mu)))


def field_csv(fields: Iterable[TransitionField]) -> str:
    def rows():
        for f in fields:
            for x, p, q, d in zip(f.positions, f.p, f.q, f.defined):
                yield f.n, x, p, q, bool(d)

    return to_csv(["n", "x", "p", "q", "defined"], rows())


def histogram_csv(batch: TrajectoryBatch) -> str:
    return to_csv(["x", "count"], sorted(batch.nonzero_endpoints().items()))


def tau_csv(s: np.ndarray, tau: np.ndarray) -> str:
    return to_csv(["s", "tau"], zip(s, tau))


def compare_rows(field: TransitionField, skeleton: SkeletonFn) -> list[tuple]:
    """Rows ``(x, s, p_n, tau, defined)`` with ``s = x/n``; ``tau`` is None for ``|s| >= 1``."""
    n = field.n
    rows = []
    for x, p, d in zip(field.positions, field.p, field.defined):
        s = x / n if n else 0.0
        tau = skeleton.tau(s) if abs(s) < 1.0 else None
        rows.append((int(x), s, float(p), tau, bool(d)))
    return rows


def compare_csv(field: TransitionField, skeleton: SkeletonFn) -> str:
    return to_csv(["x", "s", "p_n", "tau", "defined"], compare_rows(field, skeleton))


def parse_csv(text: str) -> list[dict[str, str]]:
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]
