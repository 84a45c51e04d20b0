from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
open_unit = st.floats(min_value=0.01, max_value=0.99, allow_nan=False)


@st.composite
def stochastic_matrices(draw, rows: int = 3, cols: int = 2) -> np.ndarray:
    raw = np.array(
        draw(st.lists(st.floats(0.01, 1.0), min_size=rows * cols, max_size=rows * cols))
    ).reshape(rows, cols)
    return raw / raw.sum(axis=0)


@st.composite
def prob_vectors(draw, size: int = 2) -> np.ndarray:
    raw = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=size, max_size=size))) + 1e-3
    return raw / raw.sum()
