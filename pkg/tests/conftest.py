from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from factomp.partition_core import Partition, make_partition  # noqa: E402


@st.composite
def partitions(draw, min_size: int = 1, max_size: int = 10) -> Partition:
    """Random set partitions via a random restricted-growth labelling."""
    n = draw(st.integers(min_size, max_size))
    labels = [0]
    for _ in range(n - 1):
        labels.append(draw(st.integers(0, max(labels) + 1)))
    blocks: dict[int, list[int]] = {}
    for x, lab in enumerate(labels):
        blocks.setdefault(lab, []).append(x)
    return make_partition(n, blocks.values())


@st.composite
def partition_pairs(draw, min_size: int = 1, max_size: int = 9) -> tuple[Partition, Partition]:
    n = draw(st.integers(min_size, max_size))
    p = draw(partitions(n, n))
    q = draw(partitions(n, n))
    return p, q


@pytest.fixture(scope="session")
def fact8():
    from factomp.fact_omp import build_fact

    return build_fact(8)


@pytest.fixture(scope="session")
def fact_v23():
    from factomp.vecfact import fact_v_structure

    return fact_v_structure(2, 3)


@pytest.fixture(scope="session")
def fact_v33():
    from factomp.vecfact import fact_v_structure

    return fact_v_structure(3, 3)
