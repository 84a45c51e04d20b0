"""Min-max capacities, the jammer-cost criterion and super-activation.

The common-randomness capacity of an AVC is the saddle value

    min_{q in P(S)} max_{p in P(X)} I(p; sum_s q(s) W_s),

convex in q and concave in p.  Two-point simplexes are handled by nested
golden-section search in the compiled kernels; larger input alphabets use
Blahut-Arimoto for the inner maximum and larger state sets use multi-start
SLSQP for the outer minimum.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize

from . import kernels
from .avc import Avc, CompositeSpec, Constraint, CostModel, Mode, build_composite
from .channels import prob_vector
from .symmetrize import (
    FEASIBILITY_TOL,
    NumericalFailure,
    confusion_operator,
    minimize_f,
    solve_lp,
)

ZERO_TOL = 1e-9
POSITIVE_TOL = 1e-6
SEARCH_TOL = 1e-10
BOUNDARY_TOL = 1e-9
N_STARTS = 16

_R = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CapacityResult:
    value: float
    q_star: NDArray[np.float64]
    p_star: NDArray[np.float64]
    gap: float
    mode: str
    zero_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "q_star": self.q_star.tolist(),
            "p_star": self.p_star.tolist(),
            "gap": self.gap,
            "mode": self.mode,
            "zero_reason": self.zero_reason,
        }


def _golden_min(f: Callable[[float], float], tol: float = SEARCH_TOL) -> tuple[float, float]:
    """Minimize a convex function on [0, 1]; endpoints are checked explicitly."""
    a, b = 0.0, 1.0
    c = b - _R * (b - a)
    d = a + _R * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _R * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _R * (b - a)
            fd = f(d)
    best_x = 0.5 * (a + b)
    best_f = f(best_x)
    for x in (0.0, 1.0):
        fx = f(x)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_f, best_x


def _mixture(stack: NDArray[np.float64], q: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.ascontiguousarray(np.tensordot(q, stack, axes=1))


def channel_capacity(w: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
    """max_p I(p; w) and a maximizing p."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape[1] == 1:
        return 0.0, np.array([1.0])
    if w.shape[1] == 2:
        value, p0 = kernels.binary_capacity(w, SEARCH_TOL)
        return value, np.array([p0, 1.0 - p0])
    lower, p, _upper = kernels.blahut_arimoto(w, 1e-12, 200000)
    return lower, np.asarray(p)


def _project_simplex(v: NDArray[np.float64]) -> NDArray[np.float64]:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def _mi_grad_q(stack: NDArray[np.float64], q: NDArray[np.float64], p: NDArray[np.float64]) -> NDArray[np.float64]:
    # d/dq_s I(p; W_q) = sum_x p(x) sum_y W_s(y|x) log2(W_q(y|x) / r(y))
    wq = np.tensordot(q, stack, axes=1)
    r = wq @ p
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = np.where(wq > 0, np.log2(wq / r[:, None]), 0.0)
    return np.einsum("syx,yx,x->s", stack, lr, p)


def _starts(ns: int, seed: int = 0) -> list[NDArray[np.float64]]:
    starts = [np.full(ns, 1.0 / ns)] + [np.eye(ns)[i] for i in range(ns)]
    rng = np.random.default_rng(seed)
    while len(starts) < N_STARTS:
        starts.append(rng.dirichlet(np.ones(ns)))
    return starts[:N_STARTS]


def _simplex_minimize(
    value_and_grad: Callable[[NDArray[np.float64]], tuple[float, NDArray[np.float64]]],
    ns: int,
) -> tuple[float, NDArray[np.float64]]:
    """Multi-start SLSQP on the probability simplex for a convex objective.

    A quasi-Newton method copes with the flat valleys that nearly identical
    states produce, where plain projected gradient stalls.  The best start
    wins; ties go to the smallest first coordinate.
    """
    ones = np.ones(ns)
    cons = [{"type": "eq", "fun": lambda q: q.sum() - 1.0, "jac": lambda q: ones}]
    best: tuple[float, NDArray[np.float64]] | None = None
    for q0 in _starts(ns):
        res = minimize(value_and_grad, q0, jac=True, method="SLSQP", bounds=[(0.0, 1.0)] * ns,
                       constraints=cons, options={"ftol": 1e-16, "maxiter": 500})
        q = _project_simplex(np.asarray(res.x, dtype=np.float64))
        f, _ = value_and_grad(q)
        if best is None or f < best[0] - 1e-15 or (abs(f - best[0]) <= 1e-15 and q[0] < best[1][0]):
            best = (f, q)
    assert best is not None
    return best


def _min_over_q(stack: NDArray[np.float64], p: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
    """min_q I(p; W_q) for a fixed input law."""
    ns = stack.shape[0]
    if ns == 1:
        return kernels.mutual_information(p, stack[0]), np.array([1.0])
    if ns == 2:
        value, theta = kernels.min_over_theta(p, stack[0], stack[1], SEARCH_TOL)
        return value, np.array([theta, 1.0 - theta])

    def vg(q):
        return kernels.mutual_information(p, _mixture(stack, q)), _mi_grad_q(stack, q, p)

    return _simplex_minimize(vg, ns)


def _saddle(stack: NDArray[np.float64]) -> tuple[float, NDArray[np.float64], NDArray[np.float64]]:
    ns, _ny, nx = stack.shape
    if ns == 1:
        value, p = channel_capacity(stack[0])
        return value, np.array([1.0]), p
    if ns == 2 and nx == 2:
        value, theta, p0 = kernels.minimax_two_state(
            np.ascontiguousarray(stack[0]), np.ascontiguousarray(stack[1]), SEARCH_TOL
        )
        return value, np.array([theta, 1.0 - theta]), np.array([p0, 1.0 - p0])
    if ns == 2:
        value, theta = _golden_min(
            lambda t: channel_capacity(_mixture(stack, np.array([t, 1.0 - t])))[0]
        )
        q = np.array([theta, 1.0 - theta])
        return value, q, channel_capacity(_mixture(stack, q))[1]

    def vg(q):
        value, p = channel_capacity(_mixture(stack, q))
        return value, _mi_grad_q(stack, q, p)

    value, q = _simplex_minimize(vg, ns)
    return value, q, channel_capacity(_mixture(stack, q))[1]


def cr_capacity(avc: Avc) -> CapacityResult:
    """Common-randomness-assisted capacity min_q max_p I(p; W_q) with a saddle certificate."""
    stack = avc.stack()
    value, q, p = _saddle(stack)
    upper, _ = channel_capacity(_mixture(stack, q))
    lower, _ = _min_over_q(stack, p)
    value = max(value, 0.0)
    reason = "degenerate" if value <= ZERO_TOL else None
    return CapacityResult(value, q, p, upper - lower, "cr_assisted", reason)


def deterministic_capacity(avc: Avc, tol: float = FEASIBILITY_TOL) -> CapacityResult:
    """Unassisted capacity: zero when symmetrizable, otherwise the CR capacity."""
    cr = cr_capacity(avc)
    if minimize_f(avc, tol).feasible:
        return CapacityResult(0.0, cr.q_star, cr.p_star, cr.gap, "deterministic", "symmetrizable")
    return CapacityResult(cr.value, cr.q_star, cr.p_star, cr.gap, "deterministic", cr.zero_reason)


# --- jammer cost criterion --------------------------------------------------


def _symmetrizer_constraints(avc: Avc) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    d = confusion_operator(avc)
    ns, nx = avc.num_states, avc.input_size
    simplex = np.zeros((nx, ns * nx))
    for x in range(nx):
        simplex[x, [s * nx + x for s in range(ns)]] = 1.0
    a_eq = np.vstack([d, simplex])
    b_eq = np.concatenate([np.zeros(d.shape[0]), np.ones(nx)])
    return a_eq, b_eq


def lambda0(avc: Avc, p: ArrayLike, cost: CostModel) -> float:
    """Least expected jammer cost over all symmetrizers, for input law p.

    Returns ``inf`` when the AVC has no symmetrizer.
    """
    pv = prob_vector(p)
    if pv.size != avc.input_size:
        raise ValueError("input law does not match the AVC input alphabet")
    l = cost.state_costs(avc)
    a_eq, b_eq = _symmetrizer_constraints(avc)
    c = np.outer(l, pv).ravel()
    res = solve_lp(c, A_eq=a_eq, b_eq=b_eq, bounds=[(0.0, 1.0)] * c.size)
    if res.status == 2:
        return math.inf
    if res.status != 0:
        raise NumericalFailure(f"symmetrizer-cost LP failed: {res.message}")
    return float(res.fun)


def lambda0_max(avc: Avc, cost: CostModel) -> tuple[float, NDArray[np.float64] | None]:
    """max of lambda0(p) over input laws with average input cost at most Gamma.

    lambda0 is a minimum of functions linear in p over a p-independent set, so
    the max-min collapses into one LP by dualizing the inner problem:
    maximize sum_x y_x subject to A_eq^T y <= C p, p in the constrained simplex.
    """
    a_eq, _b = _symmetrizer_constraints(avc)
    ns, nx = avc.num_states, avc.input_size
    n_rows = a_eq.shape[0]
    n_sym = n_rows - nx
    l = cost.state_costs(avc)
    g = cost.input_costs(avc)
    # variables: y (n_rows, free) then p (nx)
    c_mat = np.zeros((ns * nx, nx))
    for s in range(ns):
        for x in range(nx):
            c_mat[s * nx + x, x] = l[s]
    a_ub = [np.hstack([a_eq.T, -c_mat])]
    b_ub = [np.zeros(ns * nx)]
    if math.isfinite(cost.input_budget):
        a_ub.append(np.concatenate([np.zeros(n_rows), g])[None, :])
        b_ub.append(np.array([cost.input_budget]))
    a_eq_joint = np.concatenate([np.zeros(n_rows), np.ones(nx)])[None, :]
    obj = np.concatenate([np.zeros(n_sym), -np.ones(nx), np.zeros(nx)])
    bounds = [(None, None)] * n_rows + [(0.0, 1.0)] * nx
    res = solve_lp(obj, A_ub=np.vstack(a_ub), b_ub=np.concatenate(b_ub), A_eq=a_eq_joint,
                   b_eq=[1.0], bounds=bounds)
    if res.status == 3:
        return math.inf, None
    if res.status == 2:
        raise ValueError("no input law satisfies the input cost budget")
    if res.status != 0:
        raise NumericalFailure(f"constrained symmetrizer-cost LP failed: {res.message}")
    return float(-res.fun), res.x[n_rows:]


@dataclass(frozen=True)
class ConstrainedVerdict:
    lambda0_max: float
    budget: float
    positive: bool
    boundary: bool = False
    p_star: NDArray[np.float64] | None = None

    def to_dict(self) -> dict:
        return {
            "lambda0_max": None if math.isinf(self.lambda0_max) else self.lambda0_max,
            "symmetrizable": not math.isinf(self.lambda0_max),
            "budget": self.budget,
            "positive": self.positive,
            "boundary": self.boundary,
        }


def constrained_positive(avc: Avc, cost: CostModel) -> ConstrainedVerdict:
    """Positivity of the cost-constrained deterministic capacity.

    Positive iff the jammer cannot afford any symmetrizer at the best admissible
    input law: lambda0_max > Lambda, strictly.  Values within 1e-9 of the budget
    are reported as a non-positive boundary case.
    """
    value, p = lambda0_max(avc, cost)
    lam = cost.state_budget
    boundary = math.isfinite(value) and abs(value - lam) <= BOUNDARY_TOL
    positive = (not boundary) and value > lam
    return ConstrainedVerdict(value, lam, positive, boundary, p)


# --- super-activation -------------------------------------------------------


def summarize(avc: Avc, cost: CostModel | None = None, tol: float = FEASIBILITY_TOL) -> dict:
    """Symmetrizability, both capacities and (with a cost model) the constrained verdict."""
    sym = minimize_f(avc, tol)
    cr = cr_capacity(avc)
    det = (
        CapacityResult(0.0, cr.q_star, cr.p_star, cr.gap, "deterministic", "symmetrizable")
        if sym.feasible
        else CapacityResult(cr.value, cr.q_star, cr.p_star, cr.gap, "deterministic", cr.zero_reason)
    )
    out = {
        "symmetrizable": sym.feasible,
        "f_value": sym.f_value,
        "C_d": det.value,
        "C_r": cr.value,
        "q_star": cr.q_star.tolist(),
        "p_star": cr.p_star.tolist(),
        "gap": cr.gap,
    }
    if cost is not None:
        out["constrained"] = constrained_positive(avc, cost).to_dict()
    return out


def superactivation_check(
    components: Sequence[Avc],
    mode: Mode = "independent",
    constraint: Constraint = "identical",
    cost: CostModel | None = None,
    tol: float = FEASIBILITY_TOL,
) -> dict:
    """Compare component capacities with the composite's.

    Super-activation: every component capacity is zero (<= 1e-9) while the
    composite capacity exceeds 1e-6.  With a cost model the same test is run
    on the constrained positivity verdicts.
    """
    if len(components) < 2:
        raise ValueError("super-activation needs at least two components")
    composite = build_composite(CompositeSpec(tuple(components), mode, constraint))
    per = [summarize(c, cost, tol) for c in components]
    comp = summarize(composite, cost, tol)

    def activated(key: str) -> bool:
        return all(c[key] <= ZERO_TOL for c in per) and comp[key] > POSITIVE_TOL

    report = {
        "per_component": per,
        "composite": comp,
        "superactivated": activated("C_d"),
        "superactivated_cr": activated("C_r"),
        "mode": mode,
        "constrained": None,
    }
    if cost is not None:
        report["constrained"] = {
            "lambda": cost.state_budget,
            "gamma": None if math.isinf(cost.input_budget) else cost.input_budget,
            "superactivated": all(not c["constrained"]["positive"] for c in per)
            and comp["constrained"]["positive"],
        }
    return report
