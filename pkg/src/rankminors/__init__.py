"""Rank notions, bounded-size minors and disjoint minors of tensors over small prime fields."""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:
    __version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .families import PartitionFamily, family_for, partition_rank_family, slice_rank_family, tensor_rank_family
from .oracles import RankCertificate, disjoint_rank_exact, essential_rank_exact, rank_at_least, rrank, rrank_exact
from .tensor import MinorSelection, Tensor, restrict
