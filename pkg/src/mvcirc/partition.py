"""Partitions of {0..n-1} in canonical class-id form.

The canonical form assigns class ids in first-occurrence order, so two
partitions describe the same equivalence relation iff their id vectors are
equal.  Partitions double as congruences once they are checked to be closed
under an algebra's operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def _canonical(ids: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    out = []
    for x in ids:
        if x not in relabel:
            relabel[x] = len(relabel)
        out.append(relabel[x])
    return tuple(out)


@dataclass(frozen=True, order=True)
class Partition:
    ids: tuple[int, ...]

    @staticmethod
    def from_ids(ids: Sequence[int]) -> "Partition":
        return Partition(_canonical(ids))

    @staticmethod
    def zero(n: int) -> "Partition":
        return Partition(tuple(range(n)))

    @staticmethod
    def one(n: int) -> "Partition":
        return Partition((0,) * n)

    @staticmethod
    def from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> "Partition":
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
        return Partition(_canonical([find(i) for i in range(n)]))

    @staticmethod
    def from_classes(n: int, classes: Iterable[Iterable[int]]) -> "Partition":
        return Partition.from_pairs(n, _class_pairs(classes))

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def num_classes(self) -> int:
        return max(self.ids) + 1 if self.ids else 0

    def same(self, a: int, b: int) -> bool:
        return self.ids[a] == self.ids[b]

    def class_of(self, a: int) -> int:
        return self.ids[a]

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for x, c in enumerate(self.ids):
            out[c].append(x)
        return out

    def pairs(self) -> Iterator[tuple[int, int]]:
        """All related pairs (a, b) with a < b."""
        for cls in self.classes():
            for i, a in enumerate(cls):
                for b in cls[i + 1:]:
                    yield (a, b)

    def leq(self, other: "Partition") -> bool:
        """self refines other: every self-class sits inside an other-class."""
        if self.n != other.n:
            raise ValueError("partitions over different universes")
        seen: dict[int, int] = {}
        for x in range(self.n):
            c = self.ids[x]
            if c in seen:
                if other.ids[x] != seen[c]:
                    return False
            else:
                seen[c] = other.ids[x]
        return True

    def join(self, other: "Partition") -> "Partition":
        """Least upper bound in the partition lattice (transitive closure of the union)."""
        if self.n != other.n:
            raise ValueError("partitions over different universes")
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for p in (self, other):
            for cls in p.classes():
                for x in cls[1:]:
                    ra, rb = find(cls[0]), find(x)
                    if ra != rb:
                        parent[rb] = ra
        return Partition(_canonical([find(i) for i in range(self.n)]))

    def meet(self, other: "Partition") -> "Partition":
        if self.n != other.n:
            raise ValueError("partitions over different universes")
        return Partition(_canonical(list(zip(self.ids, other.ids))))  # type: ignore[arg-type]

    def is_zero(self) -> bool:
        return self.num_classes == self.n

    def is_one(self) -> bool:
        return self.num_classes <= 1

    def __str__(self) -> str:
        return "{" + "|".join(" ".join(str(x) for x in cls) for cls in self.classes()) + "}"

    @staticmethod
    def parse(text: str, n: int) -> "Partition":
        """Parse the {0 2|1 3} display form; singleton classes may be omitted."""
        body = text.strip()
        if body.startswith("{") and body.endswith("}"):
            body = body[1:-1]
        pairs: list[tuple[int, int]] = []
        for chunk in body.split("|"):
            elems = [int(tok) for tok in chunk.split()]
            for x in elems:
                if not 0 <= x < n:
                    raise ValueError(f"element {x} out of range for size {n}")
            pairs.extend((elems[0], x) for x in elems[1:])
        return Partition.from_pairs(n, pairs)


def _class_pairs(classes: Iterable[Iterable[int]]) -> list[tuple[int, int]]:
    pairs = []
    for cls in classes:
        cls = list(cls)
        pairs.extend((cls[0], x) for x in cls[1:])
    return pairs
