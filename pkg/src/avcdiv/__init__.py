"""Arbitrarily varying channels, symmetrizability and super-activation."""
from __future__ import annotations

from .avc import Avc, CompositeSpec, CostModel, build_composite, bsc_avc
from .capacity import cr_capacity, deterministic_capacity, lambda0_max, superactivation_check
from .channels import Channel, make_bsc
from .symmetrize import is_symmetrizable, minimize_f, region_scan

__all__ = [
    "Avc",
    "Channel",
    "CompositeSpec",
    "CostModel",
    "build_composite",
    "bsc_avc",
    "cr_capacity",
    "deterministic_capacity",
    "is_symmetrizable",
    "lambda0_max",
    "make_bsc",
    "minimize_f",
    "region_scan",
    "superactivation_check",
]
