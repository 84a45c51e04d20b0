"""Symmetrizability of AVCs and the distance-from-symmetrizability functional.

A symmetrizer is a channel U from inputs to states with

    sum_s w(y|x, s) u(s|x') == sum_s w(y|x', s) u(s|x)    for all x, x', y.

The distance functional F is the minimum over U of the worst input pair's L1
mismatch between the two sides.  It is piecewise linear and convex in U, so it
is computed exactly as a linear program.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from .avc import Avc, CompositeSpec, bsc_avc, build_composite
from .channels import Channel

FEASIBILITY_TOL = 1e-9
FLIP_TOL = 1e-12

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class NumericalFailure(RuntimeError):
    """A linear program did not reach an optimal solution."""


def solve_lp(c, **kwargs):
    """HiGHS with tight tolerances, retried at default tolerances if the status is inconclusive.

    Badly scaled inputs (entries near 1e-10) can leave HiGHS without a model
    status at the tight setting; statuses 0 (optimal), 2 (infeasible) and 3
    (unbounded) are returned as they are.
    """
    res = linprog(c, method="highs", options=_HIGHS_OPTIONS, **kwargs)
    if res.status in (0, 2, 3):
        return res
    return linprog(c, method="highs", **kwargs)


@dataclass(frozen=True)
class SymmetrizerResult:
    feasible: bool
    f_value: float
    residual: float
    u: Channel | None = None
    ratio: float | None = None

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "f_value": self.f_value,
            "residual": self.residual,
            "u": None if self.u is None else self.u.matrix.tolist(),
            "ratio": self.ratio,
        }


def input_pairs(nx: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(nx), 2))


def confusion_operator(avc: Avc) -> NDArray[np.float64]:
    """Matrix D with (D @ vec(U))[pair, y] = lhs - rhs of the symmetrizer equation.

    ``vec(U)`` flattens ``u[s, x]`` row-major; rows are ordered by input pair
    (x < x') then output y.
    """
    w = avc.stack()  # [s, y, x]
    ns, ny, nx = w.shape
    pairs = input_pairs(nx)
    d = np.zeros((len(pairs), ny, ns, nx))
    for k, (x, xp) in enumerate(pairs):
        # input x' with states drawn from u(.|x), minus input x with states from u(.|x')
        d[k, :, :, x] += w[:, :, xp].T
        d[k, :, :, xp] -= w[:, :, x].T
    return d.reshape(len(pairs) * ny, ns * nx)


def f_objective(avc: Avc, u: NDArray[np.float64]) -> tuple[float, float]:
    """Worst pairwise L1 mismatch and max entrywise violation for a given U[s, x]."""
    if avc.input_size < 2:
        raise ValueError("symmetrizability needs at least two input symbols")
    d = confusion_operator(avc)
    v = (d @ np.asarray(u, dtype=np.float64).ravel()).reshape(-1, avc.output_size)
    return float(np.abs(v).sum(axis=1).max()), float(np.abs(v).max())


def _clean_channel(u: NDArray[np.float64]) -> NDArray[np.float64]:
    u = np.clip(u, 0.0, None)
    return u / u.sum(axis=0, keepdims=True)


def minimize_f(avc: Avc, tol: float = FEASIBILITY_TOL) -> SymmetrizerResult:
    """Exact minimum of the distance functional via an epigraph LP.

    Variables are U (|S| x |X|), one t per (pair, y) bounding |mismatch| and z
    bounding the per-pair L1 sums.  The reported ``f_value`` is the objective
    re-evaluated at the cleaned minimizer, so it never understates the LP.
    """
    ns, nx, ny = avc.num_states, avc.input_size, avc.output_size
    if nx < 2:
        raise ValueError("symmetrizability needs at least two input symbols")
    d = confusion_operator(avc)
    npair = d.shape[0] // ny
    nu, nt = ns * nx, d.shape[0]
    nvar = nu + nt + 1

    eye_t = np.eye(nt)
    a_abs = np.vstack([np.hstack([d, -eye_t, np.zeros((nt, 1))]),
                       np.hstack([-d, -eye_t, np.zeros((nt, 1))])])
    a_sum = np.zeros((npair, nvar))
    for k in range(npair):
        a_sum[k, nu + k * ny: nu + (k + 1) * ny] = 1.0
        a_sum[k, -1] = -1.0
    a_ub = np.vstack([a_abs, a_sum])
    b_ub = np.zeros(a_ub.shape[0])

    a_eq = np.zeros((nx, nvar))
    for x in range(nx):
        a_eq[x, [s * nx + x for s in range(ns)]] = 1.0
    b_eq = np.ones(nx)

    c = np.zeros(nvar)
    c[-1] = 1.0
    bounds = [(0.0, 1.0)] * nu + [(0.0, None)] * (nt + 1)
    res = solve_lp(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds)
    if res.status != 0:
        raise NumericalFailure(f"distance LP failed: {res.message}")
    u = _clean_channel(res.x[:nu].reshape(ns, nx))
    f_value, residual = f_objective(avc, u)
    return SymmetrizerResult(f_value <= tol, f_value, residual, Channel(u))


def is_symmetrizable(avc: Avc, tol: float = FEASIBILITY_TOL) -> SymmetrizerResult:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return minimize_f(avc, tol)


def symmetrizer_ratio(w1: float, w2: float) -> float:
    """u(2|1) - u(1|0), which every symmetrizer of {BSC(w1), BSC(w2)} must satisfy."""
    if w1 == w2:
        raise ValueError("identical states: the jammer has no influence (plain DMC)")
    return (w1 + w2 - 1.0) / (w1 - w2)


def avbsc_symmetrizer_closed_form(w1: float, w2: float) -> SymmetrizerResult:
    """Closed-form answer for the two-state AVBSC {BSC(w1), BSC(w2)}.

    Symmetrizable iff the ratio d = u(2|1) - u(1|0) lies in [-1, 1]; the
    returned symmetrizer is the centred one u(1|0) = (1-d)/2, u(2|1) = (1+d)/2.
    When infeasible the distance is 2 min(|2 w1 - 1|, |2 w2 - 1|).
    """
    d = symmetrizer_ratio(w1, w2)
    if abs(d) <= 1.0 + FLIP_TOL:
        d = min(1.0, max(-1.0, d))
        u10 = (1.0 - d) / 2.0
        u21 = (1.0 + d) / 2.0
        u = np.array([[u10, 1.0 - u21], [1.0 - u10, u21]])
        f_value, residual = f_objective(bsc_avc([w1, w2]), u)
        return SymmetrizerResult(True, f_value, residual, Channel(u), d)
    f_value = 2.0 * min(abs(2.0 * w1 - 1.0), abs(2.0 * w2 - 1.0))
    return SymmetrizerResult(False, f_value, f_value / 2.0, None, d)


def is_flip_pair(w1: float, w2: float, tol: float = FLIP_TOL) -> bool:
    return abs(w2 - (1.0 - w1)) <= tol


@dataclass(frozen=True)
class Classification:
    verdict: str
    symmetrizable: bool | None
    reason: str | None = None
    f_value: float | None = None


def _isc(params: Sequence[Sequence[float]], mode: str = "independent") -> Avc:
    return build_composite(CompositeSpec(tuple(bsc_avc(p) for p in params), mode, "identical"))


def classify_k3(params: Sequence[Sequence[float]], cross_check: bool = False) -> Classification:
    """Verdict for the identical-state composite of three two-state AVBSCs.

    Outside the degenerate cases the composite is non-symmetrizable unless
    all three components are flip pairs (w_i2 = 1 - w_i1).
    """
    params = [tuple(map(float, p)) for p in params]
    if len(params) != 3 or any(len(p) != 2 for p in params):
        raise ValueError("need three (w_i1, w_i2) pairs")
    reason = None
    for i, (a, b) in enumerate(params, start=1):
        if a == b:
            reason = f"component {i} has identical states"
        elif a == 0.5 or b == 0.5:
            reason = f"component {i} has a BSC(1/2) state"
        if reason:
            break
    f_value = minimize_f(_isc(params)).f_value if cross_check else None
    if reason:
        sym = None if f_value is None else f_value <= FEASIBILITY_TOL
        return Classification("hypothesis-violated", sym, reason, f_value)
    if all(is_flip_pair(a, b) for a, b in params):
        return Classification("exceptional-flip-case", True, None, f_value)
    return Classification("non-symmetrizable", False, None, f_value)


def classify_k2_flip(w11: float, w12: float, w21: float, cross_check: bool = False) -> Classification:
    """Identical-state composite of {BSC(w11), BSC(w12)} with the flip pair {BSC(w21), BSC(1-w21)}."""
    f_value = None
    if cross_check:
        f_value = minimize_f(_isc([(w11, w12), (w21, 1.0 - w21)])).f_value
    if w11 == w12 or w21 == 0.5:
        reason = "identical states" if w11 == w12 else "second component is BSC(1/2)"
        return Classification("excluded", None, reason, f_value)
    if is_flip_pair(w11, w12):
        return Classification("symmetrizable", True, None, f_value)
    return Classification("non-symmetrizable", False, None, f_value)


# --- region scans -----------------------------------------------------------

VERDICTS = ("symmetrizable", "non-symmetrizable", "excluded")


@dataclass(frozen=True)
class RegionCell:
    w11: float
    w12: float
    f_value: float
    verdict: str


@dataclass(frozen=True)
class RegionScan:
    K: int
    step: float
    fixed: tuple[tuple[float, float], ...]
    cells: tuple[RegionCell, ...]
    metadata: dict = field(default_factory=dict)

    def count(self, verdict: str) -> int:
        return sum(c.verdict == verdict for c in self.cells)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["w11", "w12", "f_value", "verdict"])
        for c in self.cells:
            writer.writerow([_fmt(c.w11), _fmt(c.w12), _fmt(c.f_value), c.verdict])
        return buf.getvalue()


def _fmt(v: float) -> str:
    return format(v, ".12g")


def grid_values(step: float) -> list[float]:
    if not 0.0 < step < 0.5:
        raise ValueError(f"grid step must lie in (0, 0.5), got {step}")
    n = int(math.floor(1.0 / step + 1e-9))
    return [round(i * step, 12) for i in range(n + 1)]


def _in_domain(w11: float, w12: float) -> bool:
    # the plotted sets are subsets of {w11 < 1/2 < w12}
    return w11 < 0.5 < w12


def _scan_cell(args) -> RegionCell:
    w11, w12, fixed, tol = args
    f_value = minimize_f(_isc([(w11, w12), *fixed])).f_value
    if not _in_domain(w11, w12):
        verdict = "excluded"
    else:
        verdict = "symmetrizable" if f_value <= tol else "non-symmetrizable"
    return RegionCell(w11, w12, f_value, verdict)


def _fixed_hypotheses(K: int, fixed: Sequence[tuple[float, float]]) -> list[str]:
    notes = []
    for i, (a, b) in enumerate(fixed, start=2):
        if a == b:
            notes.append(f"component {i} has identical states")
        if 0.5 in (a, b):
            notes.append(f"component {i} has a BSC(1/2) state")
    if K == 2 and not is_flip_pair(*fixed[0]):
        notes.append("component 2 is not a flip pair; no closed form applies")
    if K == 3 and all(is_flip_pair(*p) for p in fixed):
        notes.append("components 2 and 3 are flip pairs; the flip exception is reachable")
    return notes


def region_scan(
    K: int,
    fixed: Sequence[Sequence[float]] = (),
    step: float = 0.05,
    tol: float = FEASIBILITY_TOL,
    workers: int = 1,
) -> RegionScan:
    """Classify every (w11, w12) grid cell for the identical-state composite.

    ``fixed`` holds the parameter pairs of components 2..K.  Cells outside
    {w11 < 1/2 < w12} are marked ``excluded`` but still carry their LP value.
    """
    if K not in (1, 2, 3):
        raise ValueError("K must be 1, 2 or 3")
    fixed = tuple((float(a), float(b)) for a, b in fixed)
    if len(fixed) != K - 1:
        raise ValueError(f"K={K} needs {K - 1} fixed component pairs, got {len(fixed)}")
    values = grid_values(step)
    jobs = [(a, b, fixed, tol) for a in values for b in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_scan_cell, jobs, chunksize=64))
    else:
        cells = [_scan_cell(j) for j in jobs]
    meta = {"K": K, "fixed": [list(p) for p in fixed], "hypothesis_notes": _fixed_hypotheses(K, fixed)}
    return RegionScan(K, step, fixed, tuple(cells), meta)
