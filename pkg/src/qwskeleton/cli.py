"""Command line front end.

Subcommands::

    qw run         exact distribution       n,x,mu
    qwrw field     transition field         n,x,p,q,defined
    qwrw sample    QWRW endpoint histogram  x,count
    qsrw sample    QSRW endpoint histogram  x,count
    skeleton eval  tau sweep                s,tau
    compare        p_N against tau(x/N)     x,s,p_n,tau,defined
    verify         identity and decay checks (JSON report)

Every option can also come from a ``--config`` file of ``key = value``
lines; flags given on the command line win.  Exit codes: 0 success,
1 failed verification, 2 usage or validation error (a one-line JSON
``{"code", "message"}`` is printed to stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .coin import CoinSpec, build_coin, hadamard, random_coin
from .engine import iter_walk, lemma_tf_deviation, run_walk, summary
from .errors import DomainError, InvalidInitialState, WalkError
from .export import compare_csv, distribution_csv, field_csv, histogram_csv, tau_csv, to_csv
from .qwrw import path_weight_transition_field, sample_qwrw, transition_field, transition_fields
from .sampling import total_variation
from .skeleton import SkeletonFn, sample_qsrw
from .spectral import osc_integral, weak_residual_from_field

SEED_ENV = "QWSKELETON_SEED"

INIT_PRESETS = {
    "L": (1.0, 0.0, 0.0, 0.0),
    "R": (0.0, 0.0, 1.0, 0.0),
    "sym": (1 / math.sqrt(2), 0.0, 0.0, 1 / math.sqrt(2)),
}

DEFAULTS = {
    "coin": "hadamard",
    "init": "sym",
    "steps": 100,
    "trials": 10000,
    "threads": 1,
    "out": "-",
    "manifest": None,
    "format": "csv",
    "abs_a": None,
    "s": None,
    "grid": 199,
    "branch": "auto",
    "lemma_coins": 10,
    "lemma_n": 50,
    "rl_n": "10,100,1000",
    "rl_csv": None,
    "wr_n": None,
    "wr_csv": None,
}


class UsageError(WalkError):
    code = "UsageError"


@dataclass
class RunConfig:
    command: str
    coin: list[float]
    phi: list[float]
    steps: int
    trials: int
    seed: int
    threads: int
    out: str
    format: str
    extra: dict = field(default_factory=dict)


def parse_coin(text: str) -> CoinSpec:
    """``hadamard``, five reals ``a_re,a_im,b_re,b_im,delta``, or ``key=value`` pairs.

    Keys for the pair form are ``a``, ``b`` (complex literals), ``a_re``,
    ``a_im``, ``b_re``, ``b_im`` and ``delta``.  A missing ``b`` becomes the
    real ``sqrt(1 - |a|^2)``; a missing ``delta`` is 0.
    """
    text = text.strip()
    if text.lower() == "hadamard":
        return hadamard()
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        if all("=" not in p for p in parts):
            if len(parts) != 5:
                raise UsageError("coin needs 5 reals: a_re,a_im,b_re,b_im,delta")
            ar, ai, br, bi, d = (float(p) for p in parts)
            return build_coin(complex(ar, ai), complex(br, bi), d)
        kv = dict(p.split("=", 1) for p in parts)
        unknown = set(kv) - {"a", "b", "a_re", "a_im", "b_re", "b_im", "delta"}
        if unknown:
            raise UsageError(f"unknown coin keys {sorted(unknown)}")
        if "a" in kv:
            a = complex(kv["a"].replace(" ", ""))
        else:
            a = complex(float(kv.get("a_re", 1 / math.sqrt(2))), float(kv.get("a_im", 0.0)))
        if "b" in kv:
            b = complex(kv["b"].replace(" ", ""))
        elif "b_re" in kv or "b_im" in kv:
            b = complex(float(kv.get("b_re", 0.0)), float(kv.get("b_im", 0.0)))
        else:
            b = complex(math.sqrt(max(0.0, 1.0 - abs(a) ** 2)), 0.0)
        return build_coin(a, b, float(kv.get("delta", 0.0)))
    except ValueError as exc:
        if isinstance(exc, WalkError):
            raise
        raise UsageError(f"cannot parse coin {text!r}: {exc}") from None


def parse_init(text: str) -> np.ndarray:
    text = text.strip()
    vals = INIT_PRESETS.get(text)
    if vals is None:
        try:
            vals = tuple(float(p) for p in text.split(","))
        except ValueError:
            raise UsageError(f"cannot parse initial state {text!r}") from None
        if len(vals) != 4:
            raise UsageError("initial state needs 4 reals: L_re,L_im,R_re,R_im")
    phi = np.array([complex(vals[0], vals[1]), complex(vals[2], vals[3])])
    norm = float(np.linalg.norm(phi))
    if abs(norm - 1.0) > 1e-12:
        raise InvalidInitialState(f"initial state must have unit norm, got {norm!r}")
    return phi


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def read_config(path: str) -> dict[str, str]:
    cfg = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwskeleton", description="Quantum walk skeleton-structure toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def common(p, *, walk=True, sampling=False):
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--out", "-o", help="output path ('-' for stdout)")
        p.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
        p.add_argument("--format", choices=["csv", "json"])
        if walk:
            p.add_argument("--coin", help="'hadamard', 'a_re,a_im,b_re,b_im,delta' or 'a=..,b=..,delta=..'")
            p.add_argument("--init", help="'L', 'R', 'sym' or 'L_re,L_im,R_re,R_im'")
            p.add_argument("--steps", "-N", type=int)
        if sampling:
            p.add_argument("--trials", type=int)
            p.add_argument("--seed", type=int, help=f"default: ${SEED_ENV} or 0")
            p.add_argument("--threads", type=int)

    qw = groups.add_parser("qw").add_subparsers(dest="command", required=True, parser_class=_Parser)
    common(qw.add_parser("run", help="exact position distribution"))

    qwrw = groups.add_parser("qwrw").add_subparsers(dest="command", required=True, parser_class=_Parser)
    common(qwrw.add_parser("field", help="transition probabilities for n = 0..N"))
    common(qwrw.add_parser("sample", help="QWRW Monte Carlo endpoints"), sampling=True)

    qsrw = groups.add_parser("qsrw").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = qsrw.add_parser("sample", help="QSRW Monte Carlo endpoints")
    common(p, sampling=True)
    p.add_argument("--abs-a", type=float, help="use |a| directly instead of --coin")

    sk = groups.add_parser("skeleton").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sk.add_parser("eval", help="evaluate tau(s)")
    common(p, walk=False)
    p.add_argument("--coin")
    p.add_argument("--abs-a", type=float)
    p.add_argument("--s", help="comma-separated s values (default: uniform grid)")
    p.add_argument("--grid", type=int, help="grid size over [-0.99, 0.99]")
    p.add_argument("--branch", choices=["auto", "inside", "outside"])

    common(groups.add_parser("compare", help="p_N(x) against tau(x/N)"))

    p = groups.add_parser("verify", help="walk-convention identity and integral decay")
    common(p, walk=False, sampling=False)
    p.add_argument("--coin")
    p.add_argument("--init")
    p.add_argument("--seed", type=int)
    p.add_argument("--lemma-coins", type=int)
    p.add_argument("--lemma-n", type=int)
    p.add_argument("--rl-n", help="comma-separated n for the oscillatory-integral sweep")
    p.add_argument("--rl-csv", help="write n,abs_In,err_est here")
    p.add_argument("--wr-n", help="comma-separated n for the weak-residual study")
    p.add_argument("--wr-csv", help="write n,residual here")
    return parser


def _resolve(args: argparse.Namespace) -> dict:
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    opts = {}
    for key, default in DEFAULTS.items():
        val = getattr(args, key, None)
        if val is None:
            val = cfg.get(key, default)
        opts[key] = val
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = cfg.get("seed", os.environ.get(SEED_ENV, 0))
    try:
        opts["seed"] = int(seed)
        for key in ("steps", "trials", "threads", "grid", "lemma_coins", "lemma_n"):
            opts[key] = int(opts[key])
        if opts["abs_a"] is not None:
            opts["abs_a"] = float(opts["abs_a"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if opts["steps"] < 0:
        raise UsageError("--steps must be non-negative")
    if opts["trials"] < 0:
        raise UsageError("--trials must be non-negative")
    if opts["threads"] < 1:
        raise UsageError("--threads must be >= 1")
    if opts["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    if opts["branch"] not in ("auto", "inside", "outside"):
        raise UsageError("--branch must be auto, inside or outside")
    return opts


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _write_manifest(config: RunConfig, opts: dict, extra: dict, started: float) -> None:
    path = opts["manifest"]
    if path is None:
        if opts["out"] == "-":
            return
        path = opts["out"] + ".manifest.json"
    manifest = {
        "tool": "qwskeleton",
        "version": __version__,
        "config": asdict(config),
        "elapsed_ms": round((time.perf_counter() - started) * 1000.0, 3),
    }
    manifest.update(extra)
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _phi_reals(phi: np.ndarray) -> list[float]:
    return [phi[0].real, phi[0].imag, phi[1].real, phi[1].imag]


def _skeleton_for(opts: dict) -> SkeletonFn:
    if opts["abs_a"] is not None:
        a = opts["abs_a"]
        if not 0.0 < a < 1.0:
            raise DomainError("--abs-a must lie in (0, 1)")
        return SkeletonFn.from_abs_a(a)
    return SkeletonFn.from_coin(parse_coin(opts["coin"]))


def cmd_qw_run(opts: dict, config: RunConfig, coin: CoinSpec, phi: np.ndarray) -> tuple[str, dict, int]:
    state = run_walk(coin, phi, opts["steps"])
    summ = summary(state)
    if opts["format"] == "json":
        body = json.dumps({**summ, "x": state.positions.tolist(), "mu": state.mu.tolist()}) + "\n"
    else:
        body = distribution_csv(state)
    return body, {"summary": summ}, 0


def cmd_qwrw_field(opts, config, coin, phi):
    fields = [transition_field(s, coin) for s in _states(coin, phi, opts["steps"])]
    undefined = int(sum((~f.defined).sum() for f in fields))
    return field_csv(fields), {"undefined_sites": undefined}, 0


def _states(coin, phi, steps):
    return list(iter_walk(coin, phi, steps))


def cmd_qwrw_sample(opts, config, coin, phi):
    N = opts["steps"]
    fields = transition_fields(coin, phi, N)
    batch = sample_qwrw(coin, phi, N, opts["trials"], opts["seed"], threads=opts["threads"], fields=fields)
    extra = {"mode": "qwrw", "block_size_rng": "philox(seed, block)"}
    if batch.trials:
        mu = run_walk(coin, phi, N).mu
        extra["tv_to_qw"] = total_variation(batch.counts, mu)
    return histogram_csv(batch), extra, 0


def cmd_qsrw_sample(opts, config, coin, phi):
    skeleton = _skeleton_for(opts)
    batch = sample_qsrw(skeleton, opts["steps"], opts["trials"], opts["seed"], threads=opts["threads"])
    extra = {
        "mode": "qsrw",
        "abs_a": skeleton.abs_a,
        "conventions": {
            "left_prob_at_n0": 0.5,
            "boundary_abs_s_eq_1": "outside-branch formula evaluated at s = +-1",
        },
    }
    return histogram_csv(batch), extra, 0


def cmd_skeleton_eval(opts, config):
    sk = _skeleton_for(opts)
    if opts["s"] is not None:
        try:
            s = np.array([float(v) for v in str(opts["s"]).split(",") if v.strip()])
        except ValueError:
            raise UsageError(f"cannot parse --s {opts['s']!r}") from None
    else:
        s = np.linspace(-0.99, 0.99, opts["grid"])
    fn = {"auto": sk.tau, "inside": sk.tau1, "outside": sk.tau2}[opts["branch"]]
    tau = np.array([fn(float(v)) for v in s])
    return tau_csv(s, tau), {"abs_a": sk.abs_a, "branch": opts["branch"]}, 0


def cmd_compare(opts, config, coin, phi):
    N = opts["steps"]
    if N < 1:
        raise DomainError("compare needs --steps >= 1")
    field = transition_field(run_walk(coin, phi, N), coin)
    sk = SkeletonFn.from_coin(coin)
    return compare_csv(field, sk), {"abs_a": sk.abs_a}, 0


def cmd_verify(opts, config, coin):
    rng = np.random.default_rng(opts["seed"])
    coins = [coin] + [random_coin(rng) for _ in range(opts["lemma_coins"])]
    lemma_dev = max(lemma_tf_deviation(c, opts["lemma_n"]) for c in coins)

    # Gudder-route transition probabilities against the direct ones.
    phi = parse_init(opts["init"])
    route_dev = 0.0
    for c in coins:
        for st in _states(c, phi, min(opts["lemma_n"], 50)):
            direct = transition_field(st, c)
            via = path_weight_transition_field(st.n, c, phi)
            m = direct.defined & via.defined
            if m.any():
                route_dev = max(route_dev, float(np.max(np.abs(direct.p[m] - via.p[m]))))

    rl_rows = []
    for n in parse_int_list(opts["rl_n"]):
        r = osc_integral(lambda s: 1.0, coin.abs_a, n, 1, coin.abs_a)
        rl_rows.append({"n": n, "abs_In": abs(r.value), "err_est": r.err_est})
    rl_vals = [r["abs_In"] for r in rl_rows]
    rl_decreasing = all(b < a for a, b in zip(rl_vals, rl_vals[1:]))
    rl_err_ok = all(r["err_est"] < 1e-8 for r in rl_rows)
    if opts["rl_csv"]:
        Path(opts["rl_csv"]).write_text(
            to_csv(["n", "abs_In", "err_est"], [(r["n"], r["abs_In"], r["err_est"]) for r in rl_rows])
        )

    report = {
        "lemma_tf_max_dev": lemma_dev,
        "lemma_tf_pass": lemma_dev < 1e-10,
        "route_max_dev": route_dev,
        "route_pass": route_dev < 1e-10,
        "rl": rl_rows,
        "rl_pass": rl_decreasing and rl_err_ok,
    }
    if opts["wr_n"]:
        half = min(0.5, 0.7 * coin.abs_a)
        window = (-half, half)
        wr_rows = []
        for n in parse_int_list(opts["wr_n"]):
            f = transition_field(run_walk(coin, phi, n), coin)
            wr_rows.append({"n": n, "residual": weak_residual_from_field(f, coin.abs_a, window)})
        report["wr"] = wr_rows
        if opts["wr_csv"]:
            Path(opts["wr_csv"]).write_text(
                to_csv(["n", "residual"], [(r["n"], r["residual"]) for r in wr_rows])
            )
    passed = report["lemma_tf_pass"] and report["route_pass"] and report["rl_pass"]
    report["pass"] = passed
    return json.dumps(report, indent=2) + "\n", {"report": report}, 0 if passed else 1


def run(argv: list[str] | None = None) -> int:
    started = time.perf_counter()
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = _resolve(args)
    name = args.group if args.group in ("compare", "verify") else f"{args.group} {args.command}"

    coin = None
    phi = None
    if name not in ("skeleton eval",) and not (name == "qsrw sample" and opts["abs_a"] is not None):
        coin = parse_coin(opts["coin"])
    if name not in ("skeleton eval", "verify", "qsrw sample"):
        phi = parse_init(opts["init"])
    config = RunConfig(
        command=name,
        coin=coin.as_reals() if coin is not None else [],
        phi=_phi_reals(phi) if phi is not None else [],
        steps=opts["steps"],
        trials=opts["trials"],
        seed=opts["seed"],
        threads=opts["threads"],
        out=opts["out"],
        format=opts["format"],
        extra={k: opts[k] for k in ("abs_a", "s", "grid", "branch", "lemma_coins", "lemma_n", "rl_n", "wr_n")},
    )

    if name == "qw run":
        body, extra, code = cmd_qw_run(opts, config, coin, phi)
    elif name == "qwrw field":
        body, extra, code = cmd_qwrw_field(opts, config, coin, phi)
    elif name == "qwrw sample":
        body, extra, code = cmd_qwrw_sample(opts, config, coin, phi)
    elif name == "qsrw sample":
        body, extra, code = cmd_qsrw_sample(opts, config, coin, phi)
    elif name == "skeleton eval":
        body, extra, code = cmd_skeleton_eval(opts, config)
    elif name == "compare":
        body, extra, code = cmd_compare(opts, config, coin, phi)
    else:
        body, extra, code = cmd_verify(opts, config, coin)

    _emit(body, opts["out"])
    _write_manifest(config, opts, extra, started)
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except WalkError as exc:
        sys.stderr.write(json.dumps({"code": exc.code, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
