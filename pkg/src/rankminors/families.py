"""Families of set partitions driving the generic R-rank, and the down-shadow step.

Partitions are stored canonically as sorted tuples of sorted tuples of axis
indices.  A family also records its ground set, which is range(d) for a family
on a full tensor but can be a subset of axes (the complement family R_comp).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AlreadyTensorRank

Partition = tuple[tuple[int, ...], ...]


def canonical_partition(parts: Iterable[Iterable[int]]) -> Partition:
    return tuple(sorted(tuple(sorted(int(a) for a in part)) for part in parts))


class PartitionFamily:
    __slots__ = ("ground", "partitions")

    def __init__(self, partitions: Iterable, ground: Sequence[int] | int | None = None):
        parts = sorted({canonical_partition(P) for P in partitions})
        if not parts:
            raise ValueError("a partition family must be nonempty")
        if ground is None:
            ground = sorted({a for part in parts[0] for a in part})
        elif isinstance(ground, int):
            ground = range(ground)
        ground = tuple(sorted(ground))
        for P in parts:
            flat = [a for part in P for a in part]
            if any(not part for part in P) or sorted(flat) != list(ground):
                raise ValueError(f"{P} is not a partition of {ground}")
        self.ground = ground
        self.partitions: tuple[Partition, ...] = tuple(parts)

    @property
    def d(self) -> int:
        return len(self.ground)

    def __eq__(self, other) -> bool:
        return isinstance(other, PartitionFamily) and (self.ground, self.partitions) == (other.ground, other.partitions)

    def __hash__(self) -> int:
        return hash((self.ground, self.partitions))

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    def __contains__(self, P) -> bool:
        return canonical_partition(P) in self.partitions

    def __repr__(self) -> str:
        return f"PartitionFamily({list(self.partitions)}, ground={self.ground})"

    def issubset(self, other: "PartitionFamily") -> bool:
        return self.ground == other.ground and set(self.partitions) <= set(other.partitions)

    def relabel(self, mapping: dict[int, int]) -> "PartitionFamily":
        return PartitionFamily(
            [[[mapping[a] for a in part] for part in P] for P in self.partitions],
            ground=[mapping[a] for a in self.ground],
        )

    def reindexed(self) -> "PartitionFamily":
        """The same family on ground set range(d), keeping the order of axes."""
        return self.relabel({a: i for i, a in enumerate(self.ground)})

    def to_dict(self) -> dict:
        g = {a: i + 1 for i, a in enumerate(self.ground)}
        return {"d": self.d, "partitions": [[[g[a] for a in part] for part in P] for P in self.partitions]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "PartitionFamily":
        d = int(data["d"])
        fam = cls([[[a - 1 for a in part] for part in P] for P in data["partitions"]], ground=d)
        return fam

    @classmethod
    def from_json(cls, text: str) -> "PartitionFamily":
        return cls.from_dict(json.loads(text))


def set_partitions(ground: Sequence[int]):
    ground = list(ground)
    if not ground:
        yield ()
        return
    first, rest = ground[0], ground[1:]
    for P in set_partitions(rest):
        yield canonical_partition(((first,),) + P)
        for i in range(len(P)):
            yield canonical_partition(P[:i] + ((first,) + P[i],) + P[i + 1:])


def bipartitions(ground: Sequence[int]) -> list[Partition]:
    ground = tuple(sorted(ground))
    out = set()
    for r in range(1, len(ground)):
        for I in itertools.combinations(ground, r):
            J = tuple(a for a in ground if a not in I)
            out.add(canonical_partition([I, J]))
    return sorted(out)


def tensor_rank_family(d: int | Sequence[int]) -> PartitionFamily:
    ground = range(d) if isinstance(d, int) else d
    return PartitionFamily([[(a,) for a in ground]], ground=ground)


def slice_rank_family(d: int | Sequence[int]) -> PartitionFamily:
    ground = tuple(range(d) if isinstance(d, int) else d)
    if len(ground) == 1:
        return tensor_rank_family(ground)
    return PartitionFamily([[(a,), tuple(b for b in ground if b != a)] for a in ground], ground=ground)


def partition_rank_family(d: int | Sequence[int]) -> PartitionFamily:
    ground = tuple(range(d) if isinstance(d, int) else d)
    if len(ground) == 1:
        return tensor_rank_family(ground)
    return PartitionFamily(bipartitions(ground), ground=ground)


def flattening_family(d: int, axis: int) -> PartitionFamily:
    """Terms a(x_axis) b(rest): the family whose rank is the axis flattening rank."""
    return PartitionFamily([[(axis,), tuple(b for b in range(d) if b != axis)]], ground=d)


NOTIONS = {"tr": tensor_rank_family, "sr": slice_rank_family, "pr": partition_rank_family}


def family_for(notion: str, d: int) -> PartitionFamily:
    try:
        return NOTIONS[notion](d)
    except KeyError:
        raise ValueError(f"unknown rank notion {notion!r}") from None


def is_tensor_rank(R: PartitionFamily) -> bool:
    return R.partitions == (tuple((a,) for a in R.ground),)


def has_trivial_partition(R: PartitionFamily) -> bool:
    return (R.ground,) in R.partitions


def largest_part(R: PartitionFamily) -> tuple[int, ...]:
    """First part of maximal size met when scanning R in canonical order."""
    best: tuple[int, ...] = ()
    for P in R.partitions:
        for part in P:
            if len(part) > len(best):
                best = part
    return best


@dataclass(frozen=True)
class DownShadow:
    C: tuple[int, ...]
    R_prime: PartitionFamily
    R_plus: tuple[Partition, ...]
    R_minus: tuple[Partition, ...]
    R_comp: PartitionFamily | None


def down_shadow(R: PartitionFamily) -> DownShadow:
    if is_tensor_rank(R):
        raise AlreadyTensorRank("the all-singletons family has no down-shadow")
    C = largest_part(R)
    plus = tuple(P for P in R.partitions if C in P)
    minus = tuple(P for P in R.partitions if C not in P)
    comp_ground = tuple(a for a in R.ground if a not in C)
    comp_parts = [tuple(part for part in P if part != C) for P in plus]
    comp = PartitionFamily(comp_parts, ground=comp_ground) if comp_ground else None
    new = []
    for rest in comp_parts:
        for IJ in bipartitions(C):
            new.append(rest + IJ)
    R_prime = PartitionFamily(list(minus) + new, ground=R.ground)
    return DownShadow(C, R_prime, plus, minus, comp)


def down_shadow_chain(R: PartitionFamily) -> list[PartitionFamily]:
    chain = [R]
    while not is_tensor_rank(chain[-1]):
        chain.append(down_shadow(chain[-1]).R_prime)
    return chain


def product_family(R1: PartitionFamily, R2: PartitionFamily) -> PartitionFamily:
    R1 = R1.reindexed()
    R2 = R2.reindexed()
    shift = R1.d
    parts = []
    for P1 in R1.partitions:
        for P2 in R2.partitions:
            parts.append(P1 + tuple(tuple(a + shift for a in part) for part in P2))
    return PartitionFamily(parts, ground=R1.d + R2.d)


def induced_family(R: PartitionFamily, keep: Sequence[int]) -> PartitionFamily:
    """Family on the kept axes obtained by intersecting every part with them.

    A tensor whose other axes are singletons has R-rank equal to the induced
    rank of its slice on the kept axes.
    """
    keep = set(keep)
    parts = []
    for P in R.partitions:
        parts.append([tuple(a for a in part if a in keep) for part in P if any(a in keep for a in part)])
    return PartitionFamily(parts, ground=sorted(keep))


def every_partition_isolates(R: PartitionFamily, axis: int) -> bool:
    return all((axis,) in P for P in R.partitions)
