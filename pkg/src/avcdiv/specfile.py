"""Reading JSON channel specs.

A spec is one object (or a list of them)::

    {"components": [{"type": "bsc_avc", "w": [0.1, 0.9]}, ...],
     "mode": "independent",
     "constraint": "identical",
     "cost": {"lambda": 0.4, "gamma": 0.4}}

``constraint`` defaults to ``identical`` and may also be an explicit list of
state tuples.  ``cost`` is optional and ``gamma`` inside it defaults to no
input constraint.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .avc import Avc, CompositeSpec, CostModel, build_composite, bsc_avc

_KEYS = {"components", "mode", "constraint", "cost"}


class SpecError(ValueError):
    """The channel spec is malformed."""


@dataclass(frozen=True)
class ChannelSpec:
    composite: CompositeSpec
    cost: CostModel | None
    raw: dict

    @property
    def components(self) -> tuple[Avc, ...]:
        return self.composite.components

    def build(self) -> Avc:
        return build_composite(self.composite)


def _number(v: Any, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"{what} must be a finite number, got {v!r}")
    return float(v)


def _component(obj: Any, i: int) -> Avc:
    if not isinstance(obj, dict):
        raise SpecError(f"component {i} must be an object")
    if obj.get("type") != "bsc_avc":
        raise SpecError(f"component {i}: unsupported type {obj.get('type')!r}")
    w = obj.get("w")
    if not isinstance(w, list) or not w:
        raise SpecError(f"component {i}: 'w' must be a non-empty list")
    params = [_number(v, f"component {i} parameter") for v in w]
    try:
        return bsc_avc(params)
    except ValueError as exc:
        raise SpecError(f"component {i}: {exc}") from None


def _cost(obj: Any) -> CostModel | None:
    if obj is None:
        return None
    if not isinstance(obj, dict) or "lambda" not in obj:
        raise SpecError("'cost' must be an object with at least 'lambda'")
    lam = _number(obj["lambda"], "cost.lambda")
    gamma = _number(obj["gamma"], "cost.gamma") if obj.get("gamma") is not None else math.inf
    try:
        return CostModel.binary(lam, gamma)
    except ValueError as exc:
        raise SpecError(str(exc)) from None


def parse_spec(obj: Any) -> ChannelSpec:
    if not isinstance(obj, dict):
        raise SpecError("a channel spec must be a JSON object")
    unknown = set(obj) - _KEYS
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    comps = obj.get("components")
    if not isinstance(comps, list) or not comps:
        raise SpecError("'components' must be a non-empty list")
    if "mode" not in obj:
        raise SpecError("missing 'mode'")
    avcs = tuple(_component(c, i) for i, c in enumerate(comps, start=1))
    constraint = obj.get("constraint", "identical")
    if isinstance(constraint, list):
        constraint = [tuple(t) if isinstance(t, list) else t for t in constraint]
    try:
        composite = CompositeSpec(avcs, obj["mode"], constraint)
    except (ValueError, KeyError, TypeError) as exc:
        raise SpecError(str(exc).strip("'\"")) from None
    return ChannelSpec(composite, _cost(obj.get("cost")), obj)


def loads(text: str) -> list[ChannelSpec]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from None
    items = data if isinstance(data, list) else [data]
    if not items:
        raise SpecError("empty spec list")
    return [parse_spec(item) for item in items]


def load(path: str | Path) -> list[ChannelSpec]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from None
    return loads(text)
