"""Arbitrarily varying channels and their composites."""
from __future__ import annotations

import itertools
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .channels import Channel, make_bsc, prob_vector

Mode = Literal["orthogonal", "independent"]
Constraint = Union[Literal["unconstrained", "identical"], Sequence[tuple]]


@dataclass(frozen=True, eq=False)
class Avc:
    """A family of channels indexed by jammer states.

    ``state_labels`` keep provenance (``1, 2`` for a plain two-state AVC,
    tuples for composites); ``input_labels`` do the same for input symbols.
    """

    states: tuple[Channel, ...]
    state_labels: tuple[Hashable, ...] = ()
    input_labels: tuple[Hashable, ...] = ()

    def __post_init__(self) -> None:
        states = tuple(self.states)
        if not states:
            raise ValueError("an AVC needs at least one state")
        shape = states[0].matrix.shape
        if any(s.matrix.shape != shape for s in states):
            raise ValueError("all AVC states must share input and output alphabets")
        labels = tuple(self.state_labels) or tuple(range(1, len(states) + 1))
        if len(labels) != len(states) or len(set(labels)) != len(labels):
            raise ValueError("state labels must be unique, one per state")
        inputs = tuple(self.input_labels) or tuple(range(shape[1]))
        if len(inputs) != shape[1]:
            raise ValueError("need one input label per input symbol")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "state_labels", labels)
        object.__setattr__(self, "input_labels", inputs)

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def input_size(self) -> int:
        return self.states[0].input_size

    @property
    def output_size(self) -> int:
        return self.states[0].output_size

    def stack(self) -> NDArray[np.float64]:
        """All state matrices as an array indexed ``[s, y, x]``."""
        return np.stack([s.matrix for s in self.states])

    def state_index(self, label: Hashable) -> int:
        try:
            return self.state_labels.index(label)
        except ValueError:
            raise KeyError(f"unknown state label {label!r}") from None

    def subset(self, labels: Sequence[Hashable]) -> Avc:
        idx = [self.state_index(l) for l in labels]
        return Avc(tuple(self.states[i] for i in idx), tuple(labels), self.input_labels)

    def permuted(self, order: Sequence[int]) -> Avc:
        return Avc(
            tuple(self.states[i] for i in order),
            tuple(self.state_labels[i] for i in order),
            self.input_labels,
        )

    def __repr__(self) -> str:
        return f"Avc(states={list(self.states)!r}, labels={self.state_labels!r})"


def bsc_avc(params: Sequence[float]) -> Avc:
    """Two-or-more-state AVBSC {BSC(w_1), BSC(w_2), ...} with states labelled 1, 2, ..."""
    return Avc(tuple(make_bsc(w) for w in params))


@dataclass(frozen=True)
class CompositeSpec:
    components: tuple[Avc, ...]
    mode: Mode = "independent"
    constraint: Constraint = "identical"

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a composite needs at least one component")
        if self.mode not in ("orthogonal", "independent"):
            raise ValueError(f"unknown composite mode {self.mode!r}")
        if self.mode == "independent" and len({c.input_size for c in comps}) != 1:
            raise ValueError("independent mode requires a shared input alphabet")
        con = self.constraint
        if isinstance(con, str):
            if con not in ("unconstrained", "identical"):
                raise ValueError(f"unknown state constraint {con!r}")
            if con == "identical" and len({c.state_labels for c in comps}) != 1:
                raise ValueError("identical constraint requires a shared state set")
        else:
            tuples = [tuple(t) for t in con]
            if not tuples:
                raise ValueError("explicit state subset must be non-empty")
            for t in tuples:
                if len(t) != len(comps):
                    raise ValueError(f"state tuple {t} does not have {len(comps)} entries")
                for c, s in zip(comps, t):
                    c.state_index(s)
            object.__setattr__(self, "constraint", tuple(tuples))
        object.__setattr__(self, "components", comps)

    @property
    def K(self) -> int:
        return len(self.components)

    def state_tuples(self) -> list[tuple]:
        comps = self.components
        if self.constraint == "identical":
            return [(s,) * len(comps) for s in comps[0].state_labels]
        if self.constraint == "unconstrained":
            return list(itertools.product(*(c.state_labels for c in comps)))
        return list(self.constraint)


def build_composite(spec: CompositeSpec) -> Avc:
    """Flatten a composite into a single AVC over the constrained state tuples.

    Each state tuple maps to the Kronecker product of the component channels.
    Independent mode keeps only the diagonal inputs (x, ..., x).
    """
    comps = spec.components
    if spec.K == 1 and spec.constraint in ("identical", "unconstrained"):
        return comps[0]
    tuples = spec.state_tuples()
    states = []
    for t in tuples:
        mats = [c.states[c.state_index(s)].matrix for c, s in zip(comps, t)]
        m = mats[0]
        for nxt in mats[1:]:
            m = np.kron(m, nxt)
        states.append(m)
    if spec.mode == "independent":
        nx = comps[0].input_size
        cols = [_diagonal_index(x, [c.input_size for c in comps]) for x in range(nx)]
        states = [m[:, cols] for m in states]
        inputs = comps[0].input_labels
    else:
        inputs = tuple(itertools.product(*(c.input_labels for c in comps)))
    labels = tuple(t[0] if len(t) == 1 else t for t in tuples)
    return Avc(tuple(Channel(np.clip(m, 0.0, 1.0)) for m in states), labels, inputs)


def _diagonal_index(x: int, sizes: Sequence[int]) -> int:
    idx = 0
    for n in sizes:
        idx = idx * n + x
    return idx


def effective_channel(avc: Avc, q: ArrayLike) -> Channel:
    """The averaged channel sum_s q(s) W_s."""
    qv = prob_vector(q)
    if qv.size != avc.num_states:
        raise ValueError(f"strategy has {qv.size} entries, AVC has {avc.num_states} states")
    m = np.tensordot(qv, avc.stack(), axes=1)
    return Channel(np.clip(m, 0.0, 1.0))


def lift_identical_strategy(q: ArrayLike, K: int) -> dict[tuple[int, ...], float]:
    """Distribution on S^K induced by a jammer that plays the same state on all K branches.

    States are numbered 1..|S| and only diagonal tuples receive mass.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    qv = prob_vector(q)
    return {(s + 1,) * K: float(qv[s]) for s in range(qv.size) if qv[s] > 0}


def _label_cost(table: Mapping[Hashable, float], label: Hashable, kind: str) -> float:
    if label in table:
        return float(table[label])
    if isinstance(label, tuple) and label:
        # composite labels: average of the per-branch costs
        return float(np.mean([_label_cost(table, part, kind) for part in label]))
    raise KeyError(f"unknown {kind} label {label!r}")


@dataclass(frozen=True)
class CostModel:
    """Jammer state cost l with budget Lambda, input cost g with budget Gamma.

    Tuple labels (from composites) that are not listed explicitly cost the
    mean of their entries, so an identical-constraint state (s, s, s) costs
    l(s) and a tuple input (x1, ..., xK) costs the fraction of its weight.
    """

    state_budget: float
    input_budget: float = float("inf")
    state_cost: Mapping[Hashable, float] = field(default_factory=lambda: {1: 0.0, 2: 1.0})
    input_cost: Mapping[Hashable, float] = field(default_factory=lambda: {0: 0.0, 1: 1.0})

    def __post_init__(self) -> None:
        if self.state_budget < 0 or self.input_budget < 0:
            raise ValueError("budgets must be nonnegative")
        if any(v < 0 for v in self.state_cost.values()) or any(
            v < 0 for v in self.input_cost.values()
        ):
            raise ValueError("costs must be nonnegative")

    @classmethod
    def binary(cls, lam: float, gamma: float = float("inf"), flipped: bool = False) -> CostModel:
        """Two-state costs l(s) = s - 1 (or the relabelled 2 - s) and g(x) = x."""
        l = {1: 1.0, 2: 0.0} if flipped else {1: 0.0, 2: 1.0}
        return cls(lam, gamma, l)

    def l(self, label: Hashable) -> float:
        return _label_cost(self.state_cost, label, "state")

    def g(self, label: Hashable) -> float:
        return _label_cost(self.input_cost, label, "input")

    def state_costs(self, avc: Avc) -> NDArray[np.float64]:
        return np.array([self.l(s) for s in avc.state_labels])

    def input_costs(self, avc: Avc) -> NDArray[np.float64]:
        return np.array([self.g(x) for x in avc.input_labels])


def is_state_seq_admissible(s_seq: Sequence[Hashable], cost: CostModel) -> bool:
    """Whether the average state cost stays within the jammer budget (inclusive)."""
    if len(s_seq) == 0:
        return True
    total = sum(cost.l(s) for s in s_seq)
    return total <= cost.state_budget * len(s_seq) + 1e-12


def is_input_seq_admissible(x_seq: Sequence[Hashable], cost: CostModel) -> bool:
    """Whether the average input cost stays within the power budget (inclusive)."""
    if len(x_seq) == 0:
        return True
    total = sum(cost.g(x) for x in x_seq)
    return total <= cost.input_budget * len(x_seq) + 1e-12
