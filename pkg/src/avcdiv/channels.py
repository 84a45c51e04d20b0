"""Finite-alphabet channel algebra.

Channels are column-stochastic matrices: ``matrix[y, x] = w(y|x)``, rows are
outputs and columns are inputs.  Product alphabets are indexed
lexicographically with the first factor as the major index, which is exactly
the layout produced by :func:`numpy.kron`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import kernels

STOCHASTIC_TOL = 1e-12


def _frozen(a: NDArray[np.float64]) -> NDArray[np.float64]:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


def prob_vector(p: ArrayLike, tol: float = STOCHASTIC_TOL) -> NDArray[np.float64]:
    """Validate ``p`` as a probability vector and return a read-only copy."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("probability vector must be a non-empty 1-d array")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError(f"probability vector has negative or non-finite entries: {arr}")
    if abs(arr.sum() - 1.0) > tol:
        raise ValueError(f"probability vector sums to {arr.sum()!r}, not 1")
    return _frozen(arr)


def dirac(index: int, size: int) -> NDArray[np.float64]:
    e = np.zeros(size)
    e[index] = 1.0
    return _frozen(e)


@dataclass(frozen=True, eq=False)
class Channel:
    """A conditional distribution w(y|x) stored as an (outputs x inputs) matrix."""

    matrix: NDArray[np.float64]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or 0 in m.shape:
            raise ValueError(f"channel matrix must be 2-d and non-empty, got shape {m.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0) or np.any(m > 1):
            raise ValueError("channel entries must lie in [0, 1]")
        colsum = m.sum(axis=0)
        if np.max(np.abs(colsum - 1.0)) > STOCHASTIC_TOL:
            raise ValueError(f"channel columns must sum to 1, got {colsum}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def input_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def output_size(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, p: ArrayLike) -> NDArray[np.float64]:
        """Push a distribution on inputs through the channel."""
        return self.matrix @ np.asarray(p, dtype=np.float64)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Channel):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(
            np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self) -> int:
        return hash((self.matrix.shape, self.matrix.tobytes()))

    def allclose(self, other: Channel, atol: float = 1e-12) -> bool:
        return self.matrix.shape == other.matrix.shape and bool(
            np.allclose(self.matrix, other.matrix, rtol=0.0, atol=atol)
        )

    def __repr__(self) -> str:
        return f"Channel({self.matrix.tolist()!r})"


def identity(size: int) -> Channel:
    return Channel(np.eye(size))


def make_bsc(w: float) -> Channel:
    """BSC(w): keeps the input with probability ``w``, flips it with ``1 - w``.

    ``make_bsc(0)`` is the bit flip and ``make_bsc(1)`` the identity.
    """
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"BSC parameter must lie in [0, 1], got {w}")
    return Channel(np.array([[w, 1.0 - w], [1.0 - w, w]]))


FLIP = make_bsc(0.0)


def compose(a: Channel, b: Channel) -> Channel:
    """Apply ``b`` first, then ``a``."""
    if a.input_size != b.output_size:
        raise ValueError(
            f"cannot compose: first channel takes {a.input_size} inputs, "
            f"second produces {b.output_size} outputs"
        )
    m = a.matrix @ b.matrix
    # products of stochastic matrices can leave the unit interval by an ulp
    return Channel(np.clip(m, 0.0, 1.0))


def tensor(a: Channel, b: Channel) -> Channel:
    """Parallel use: w(y1 y2 | x1 x2) = a(y1|x1) b(y2|x2)."""
    return Channel(np.clip(np.kron(a.matrix, b.matrix), 0.0, 1.0))


def tensor_all(channels: list[Channel]) -> Channel:
    out = channels[0]
    for c in channels[1:]:
        out = tensor(out, c)
    return out


def entropy(p: ArrayLike) -> float:
    """Shannon entropy in bits with 0 log 0 = 0."""
    arr = np.asarray(p, dtype=np.float64)
    nz = arr[arr > 0]
    return float(-(nz * np.log2(nz)).sum())


def binary_entropy(x: float) -> float:
    return entropy([x, 1.0 - x])


def mutual_information(p: ArrayLike, w: Channel) -> float:
    """I(p; W) in bits for the joint law p(x) w(y|x)."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (w.input_size,):
        raise ValueError(
            f"input distribution has shape {arr.shape}, channel expects {w.input_size} inputs"
        )
    return kernels.mutual_information(np.ascontiguousarray(arr), np.ascontiguousarray(w.matrix))


def compute_xi(w1: float, w2: float) -> NDArray[np.float64]:
    """The conjugated flip V^-1 F V for V = [[w1, w2], [1-w1, 1-w2]].

    The result is a real 2x2 matrix whose columns sum to one but whose entries
    may be negative.
    """
    if w1 == w2:
        raise ValueError("singular: w1 == w2 makes V non-invertible")
    return np.array(
        [
            [1.0 - w1 - w2, 1.0 - 2.0 * w2],
            [-1.0 + 2.0 * w1, -1.0 + w1 + w2],
        ]
    ) / (w1 - w2)
