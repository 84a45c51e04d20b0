"""Command-line front end.

Exit codes: 0 on success, 2 for usage or spec errors, 3 when a numerical
routine fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import specfile
from .avc import CostModel
from .capacity import cr_capacity, deterministic_capacity, summarize, superactivation_check
from .jamsim import JammerPolicy, random_code, repetition_code, simulate
from .specfile import ChannelSpec, SpecError
from .symmetrize import (
    FEASIBILITY_TOL,
    NumericalFailure,
    avbsc_symmetrizer_closed_form,
    minimize_f,
    region_scan,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args) -> list[ChannelSpec]:
    if not args.spec:
        raise UsageError("--spec is required")
    return specfile.load(args.spec)


def _tol(args) -> float:
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    return args.tol


def _spec_meta(spec: ChannelSpec) -> dict:
    con = spec.composite.constraint
    return {
        "K": spec.composite.K,
        "mode": spec.composite.mode,
        "constraint": con if isinstance(con, str) else [list(t) for t in con],
        "parameters": [[c.matrix[0, 0] for c in comp.states] for comp in spec.components],
    }


def _cost(spec: ChannelSpec, args) -> CostModel | None:
    lam = getattr(args, "lam", None)
    gamma = getattr(args, "gamma", None)
    if lam is None and gamma is None:
        return spec.cost
    base = spec.cost
    if lam is None:
        if base is None:
            raise UsageError("--gamma needs a jammer budget (--lambda or a spec cost)")
        lam = base.state_budget
    if gamma is None:
        gamma = base.input_budget if base is not None else math.inf
    return CostModel.binary(lam, gamma)


# --- subcommands ------------------------------------------------------------


def cmd_analyze(args) -> str:
    tol = _tol(args)
    reports = []
    for spec in _load(args):
        avc = spec.build()
        sym = minimize_f(avc, tol)
        summary = summarize(avc, _cost(spec, args), tol)
        report = {**_spec_meta(spec), **summary}
        report["symmetrizer"] = None if sym.u is None or not sym.feasible else sym.u.matrix
        if spec.composite.K >= 2:
            sa = superactivation_check(
                spec.components, spec.composite.mode, spec.composite.constraint, None, tol
            )
            report["per_component"] = sa["per_component"]
            report["superactivated"] = sa["superactivated"]
            report["superactivated_cr"] = sa["superactivated_cr"]
        reports.append(report)
    return _dump(reports)


def _parse_pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--fixed expects 'w1,w2', got {text!r}") from None
    return a, b


def cmd_region(args) -> str:
    tol = _tol(args)
    if args.fixed:
        fixed = [_parse_pair(t) for t in args.fixed]
    elif args.spec:
        spec = _load(args)[0]
        fixed = [tuple(c.matrix[0, 0] for c in comp.states) for comp in spec.components[1:]]
    else:
        fixed = []
    if len(fixed) != args.k - 1:
        raise UsageError(f"K={args.k} needs {args.k - 1} fixed component pairs, got {len(fixed)}")
    if not 0.0 < args.step < 0.5:
        raise UsageError(f"--step must lie in (0, 0.5), got {args.step}")
    return region_scan(args.k, fixed, args.step, tol, workers=args.workers).to_csv()


def cmd_capacity(args) -> str:
    tol = _tol(args)
    reports = []
    for spec in _load(args):
        avc = spec.build()
        reports.append(
            {
                **_spec_meta(spec),
                "deterministic": deterministic_capacity(avc, tol).to_dict(),
                "cr_assisted": cr_capacity(avc).to_dict(),
            }
        )
    return _dump(reports)


def cmd_superact(args) -> str:
    tol = _tol(args)
    reports = []
    for spec in _load(args):
        if spec.composite.K < 2:
            raise UsageError("superact needs at least two components")
        mode = args.mode or spec.composite.mode
        report = superactivation_check(
            spec.components, mode, spec.composite.constraint, _cost(spec, args), tol
        )
        reports.append(report)
    return _dump(reports[0] if len(reports) == 1 else reports)


def _symmetrizer(spec: ChannelSpec, tol: float):
    avc = spec.build()
    if spec.composite.K == 1 and avc.num_states == 2 and avc.input_size == 2:
        w1, w2 = (s.matrix[0, 0] for s in avc.states)
        if w1 != w2:
            res = avbsc_symmetrizer_closed_form(w1, w2)
            if res.feasible:
                return res.u
    res = minimize_f(avc, tol)
    if not res.feasible:
        raise UsageError("the channel is not symmetrizable; no symmetrizing attack exists")
    return res.u


def cmd_simulate(args) -> str:
    tol = _tol(args)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.n < 1 or args.messages < 1:
        raise UsageError("--n and --messages must be at least 1")
    spec = _load(args)[0]
    avc = spec.build()
    if args.code == "repetition":
        if args.messages > avc.input_size:
            raise UsageError("a repetition code has at most |X| messages")
        code = repetition_code(args.n, avc.input_size)
        code = type(code)(code.codewords[: args.messages])
    else:
        uniform = np.full(avc.input_size, 1.0 / avc.input_size)
        code = random_code(args.n, args.messages, uniform, args.code_seed)
    cost = _cost(spec, args)
    if args.policy == "constant":
        if not 1 <= args.state <= avc.num_states:
            raise UsageError(f"--state must lie in 1..{avc.num_states}")
        policy = JammerPolicy("constant", state=args.state - 1, cost=cost)
    elif args.policy == "iid":
        q = [float(v) for v in args.q.split(",")] if args.q else [1.0 / avc.num_states] * avc.num_states
        policy = JammerPolicy("iid", q=tuple(q), cost=cost)
    else:
        policy = JammerPolicy("symmetrizing", u=_symmetrizer(spec, tol), cost=cost)
    report = simulate(avc, code, policy, args.decoder, args.trials, args.seed)
    return json.dumps(json.loads(report.to_json()), indent=2, sort_keys=True) + "\n"


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avcdiv",
        description="Symmetrizability, capacity and jamming simulation for AVBSC composites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, spec_required: bool = True) -> None:
        p.add_argument("--spec", required=spec_required, help="JSON channel spec file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--tol", type=float, default=FEASIBILITY_TOL,
                       help=f"symmetrizability tolerance (default: {FEASIBILITY_TOL:g})")

    def budgets(p: argparse.ArgumentParser) -> None:
        p.add_argument("--lambda", dest="lam", type=float, help="jammer state budget, overrides the spec")
        p.add_argument("--gamma", type=float, help="input power budget, overrides the spec")

    p = sub.add_parser("analyze", help="symmetrizability and capacities per spec")
    common(p)
    budgets(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("region", help="CSV classification of the (w11, w12) grid")
    common(p, spec_required=False)
    p.add_argument("--k", type=int, choices=(1, 2, 3), default=1, help="number of components (default: 1)")
    p.add_argument("--fixed", action="append", metavar="W1,W2",
                   help="parameters of components 2..K, repeatable")
    p.add_argument("--step", type=float, default=0.05, help="grid step in (0, 0.5) (default: 0.05)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default: 1)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("capacity", help="deterministic and CR-assisted capacities")
    common(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("superact", help="super-activation check")
    common(p)
    budgets(p)
    p.add_argument("--mode", choices=("independent", "orthogonal"), help="override the spec mode")
    p.set_defaults(func=cmd_superact)

    p = sub.add_parser("simulate", help="Monte Carlo jamming simulation")
    common(p)
    budgets(p)
    p.add_argument("--n", type=int, default=64, help="block length (default: 64)")
    p.add_argument("--messages", type=int, default=4, help="number of messages (default: 4)")
    p.add_argument("--code", choices=("random", "repetition"), default="random")
    p.add_argument("--code-seed", type=int, default=7, help="codebook seed (default: 7)")
    p.add_argument("--policy", choices=("constant", "iid", "symmetrizing"), default="symmetrizing")
    p.add_argument("--state", type=int, default=1, help="state for the constant policy, 1-based")
    p.add_argument("--q", help="comma-separated state distribution for the iid policy")
    p.add_argument("--decoder", choices=("ml", "min-hamming"), default="ml")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        text = args.func(args)
        _emit(text, args.out)
    except (UsageError, SpecError) as exc:
        print(f"avcdiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"avcdiv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"avcdiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"avcdiv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
