"""Orthomodular posets of factor pairs and of complementary subspace pairs.

The 27-point modules reconstruct point permutations from automorphisms of
the factor-pair structure.
"""

from .fact_omp import FactorPair, OmpStructure, build_fact
from .partition_core import Partition, make_partition
from .vecfact import fact_v_structure

__all__ = ["FactorPair", "OmpStructure", "Partition", "build_fact", "fact_v_structure", "make_partition"]
__version__ = "0.1.0"
