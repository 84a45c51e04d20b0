"""Monte Carlo jamming experiments over AVCs.

Every trial draws from its own generator ``default_rng([seed, trial])`` so
reports are reproducible and independent of evaluation order.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import kernels
from .avc import Avc, CostModel, effective_channel, is_state_seq_admissible
from .channels import Channel, prob_vector

MAX_RESAMPLES = 10_000


@dataclass(frozen=True, eq=False)
class Codebook:
    codewords: NDArray[np.int64]

    def __post_init__(self) -> None:
        cw = np.array(self.codewords, dtype=np.int64, copy=True)
        if cw.ndim != 2 or cw.shape[0] < 1 or cw.shape[1] < 1:
            raise ValueError("codebook needs at least one codeword of positive length")
        cw.setflags(write=False)
        object.__setattr__(self, "codewords", cw)

    @property
    def M(self) -> int:
        return self.codewords.shape[0]

    @property
    def n(self) -> int:
        return self.codewords.shape[1]


def random_code(n: int, M: int, p: ArrayLike, seed: int) -> Codebook:
    """M codewords of length n with i.i.d. letters drawn from p."""
    pv = prob_vector(p)
    if n < 1 or M < 1:
        raise ValueError("need n >= 1 and M >= 1")
    if M > pv.size ** n:
        raise ValueError(f"{M} messages exceed the {pv.size ** n} sequences of length {n}")
    rng = np.random.default_rng(seed)
    return Codebook(rng.choice(pv.size, size=(M, n), p=pv))


def repetition_code(n: int, alphabet: int = 2) -> Codebook:
    return Codebook(np.repeat(np.arange(alphabet)[:, None], n, axis=1))


def _sample_columns(cdf: NDArray[np.float64], cols: NDArray[np.int64], u: NDArray[np.float64]) -> NDArray[np.int64]:
    # cdf[k, c] = P(symbol <= k | column c); inverse-CDF sampling per position
    c = cdf[:, cols]
    idx = (u[None, :] >= c).sum(axis=0)
    return np.minimum(idx, cdf.shape[0] - 1)


@dataclass(frozen=True)
class JammerPolicy:
    """How the jammer picks the state sequence.

    ``constant``: always state index ``state``.  ``iid``: states i.i.d. from
    ``q``.  ``symmetrizing``: pick a decoy message uniformly and draw
    s_i ~ U(.|x'_i) from the decoy codeword.
    """

    kind: Literal["constant", "iid", "symmetrizing"]
    state: int = 0
    q: tuple[float, ...] | None = None
    u: Channel | None = None
    cost: CostModel | None = None

    def __post_init__(self) -> None:
        if self.kind == "iid":
            if self.q is None:
                raise ValueError("iid policy needs a state distribution q")
            object.__setattr__(self, "q", tuple(prob_vector(self.q).tolist()))
        elif self.kind == "symmetrizing":
            if self.u is None:
                raise ValueError("symmetrizing policy needs a symmetrizer channel")
        elif self.kind != "constant":
            raise ValueError(f"unknown jammer policy {self.kind!r}")

    def sampler(self, avc: Avc, codebook: Codebook):
        ns = avc.num_states
        if self.kind == "constant":
            if not 0 <= self.state < ns:
                raise ValueError(f"state index {self.state} out of range")
            return lambda rng: np.full(codebook.n, self.state, dtype=np.int64)
        if self.kind == "iid":
            if len(self.q) != ns:
                raise ValueError("state distribution does not match the AVC")
            cdf = np.cumsum(np.asarray(self.q))[:, None]
            zeros = np.zeros(codebook.n, dtype=np.int64)
            return lambda rng: _sample_columns(cdf, zeros, rng.random(codebook.n))
        return symmetrizing_attack(self.u, codebook, avc)


def symmetrizing_attack(u: Channel, codebook: Codebook, avc: Avc | None = None):
    """State sampler that imitates a random decoy codeword through U."""
    if avc is not None and (u.input_size != avc.input_size or u.output_size != avc.num_states):
        raise ValueError("symmetrizer must map the AVC inputs to its states")
    cdf = np.cumsum(u.matrix, axis=0)
    cw = codebook.codewords

    def sample(rng: np.random.Generator) -> NDArray[np.int64]:
        decoy = cw[rng.integers(codebook.M)]
        return _sample_columns(cdf, decoy, rng.random(codebook.n))

    return sample


@dataclass
class SimReport:
    trials: int
    avg_error: float
    per_message_error: list[float | None]
    seed: int
    admissibility_rejections: int = 0
    backend: str = field(default=kernels.BACKEND)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _loglik(w: NDArray[np.float64]) -> NDArray[np.float64]:
    with np.errstate(divide="ignore"):
        return np.log(w)


def simulate(
    avc: Avc,
    codebook: Codebook,
    policy: JammerPolicy,
    decoder: Literal["ml", "min-hamming"] = "ml",
    trials: int = 1000,
    seed: int = 0,
    q_nominal: ArrayLike | None = None,
) -> SimReport:
    """Estimate the average decoding error under a jammer policy.

    The message is uniform on every trial.  ``ml`` decodes by maximum
    likelihood under the averaged channel for ``q_nominal`` (uniform by
    default); ``min-hamming`` needs equal input and output alphabets.  Ties are
    broken uniformly from the trial's generator.  ``avg_error`` is the mean of
    the per-message error rates, messages never sent being left out.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    cw = codebook.codewords
    if cw.max() >= avc.input_size or cw.min() < 0:
        raise ValueError("codeword letters exceed the AVC input alphabet")
    if decoder == "ml":
        q = np.full(avc.num_states, 1.0 / avc.num_states) if q_nominal is None else q_nominal
        metric = _loglik(effective_channel(avc, q).matrix)
    elif decoder == "min-hamming":
        if avc.output_size != avc.input_size:
            raise ValueError("min-hamming decoding needs equal input and output alphabets")
        metric = -(1.0 - np.eye(avc.input_size))
    else:
        raise ValueError(f"unknown decoder {decoder!r}")

    cdf = np.cumsum(avc.stack(), axis=1)  # [s, y, x]
    sample_states = policy.sampler(avc, codebook)
    cost = policy.cost
    n, M = codebook.n, codebook.M
    messages = np.empty(trials, dtype=np.int64)
    outputs = np.empty((trials, n), dtype=np.int64)
    tie_u = np.empty(trials)
    rejections = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        m = int(rng.integers(M))
        states = sample_states(rng)
        if cost is not None:
            tries = 0
            while not is_state_seq_admissible([avc.state_labels[s] for s in states], cost):
                rejections += 1
                tries += 1
                if tries > MAX_RESAMPLES:
                    raise RuntimeError("jammer policy cannot meet the state budget")
                states = sample_states(rng)
        u = rng.random(n)
        col = cdf[states, :, cw[m]]  # (n, Y)
        y = (u[:, None] >= col).sum(axis=1)
        outputs[t] = np.minimum(y, avc.output_size - 1)
        messages[t] = m
        tie_u[t] = rng.random()
    decisions = kernels.ml_decode(np.ascontiguousarray(metric), cw, outputs, tie_u)

    errors = decisions != messages
    per = []
    for m in range(M):
        sent = messages == m
        per.append(float(errors[sent].mean()) if sent.any() else None)
    observed = [e for e in per if e is not None]
    return SimReport(trials, float(np.mean(observed)), per, int(seed), rejections)


# --- exact confusion check --------------------------------------------------


def averaged_output(avc: Avc, u: Channel, x_seq, decoy_seq) -> NDArray[np.float64]:
    """Exact output law of x^n when states are drawn from U(.|decoy_i), i.i.d. over i."""
    w = avc.stack()
    out = np.ones(1)
    for x, xp in zip(x_seq, decoy_seq):
        letter = np.tensordot(u.matrix[:, xp], w[:, :, x], axes=1)
        out = np.kron(out, letter)
    return out


def confusion_gap(avc: Avc, u: Channel, n: int) -> float:
    """Largest difference between the two sides of the confusion identity over all word pairs.

    For each pair of input words (x^n, x'^n), compares sending x^n while the
    jammer imitates x'^n with sending x'^n while it imitates x^n.
    """
    words = list(itertools.product(range(avc.input_size), repeat=n))
    gap = 0.0
    for a, b in itertools.combinations(words, 2):
        lhs = averaged_output(avc, u, a, b)
        rhs = averaged_output(avc, u, b, a)
        gap = max(gap, float(np.abs(lhs - rhs).max()))
    return gap
