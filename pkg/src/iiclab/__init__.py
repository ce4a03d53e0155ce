"""iiclab: a simulation laboratory for critical percolation and random walk
on approximations of the incipient infinite cluster.

Submodules
----------
kernels     lattice kernels (nearest-neighbor, spread-out, long-range)
explore     breadth-first cluster growth and critical diagnostics
iic         conditioned / size-biased / tree-oracle IIC approximants
metrics     balls, restricted clusters, backbone and pivotal structure
resistance  exact effective resistance, Green functions, exit times
walk        vectorized random-walk estimators
oracle      brute-force enumeration and dense-chain ground truth
harness     experiment configs, run records, exponent fits, good radii
"""

from . import explore, harness, iic, kernels, metrics, oracle, resistance, walk
from .explore import CriticalPoint, StopRule, estimate_pc, explore_cluster
from .graphs import ClusterGraph, SiteGraph
from .iic import IICSample, Offspring, sample_conditioned_iic, sample_size_biased, sample_tree_iic
from .kernels import KernelSpec

__version__ = "0.1.0"
