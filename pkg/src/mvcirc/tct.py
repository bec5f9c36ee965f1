"""Minimal sets, traces, and the five-way type labeling of prime quotients.

For a quotient alpha < beta, the candidate sets are ranges f(A) of unary
polynomials with f(beta) not inside alpha and at least two elements; the
inclusion-minimal ones are the minimal sets.  The local label is decided by
what the polynomial clone realizes on a trace: a pseudo-Malcev operation
(vector-space behavior, label 2), lattice operations with or without a
complement (labels 4 / 3), just a semilattice operation (label 5), or
nothing (label 1).  Searches are cap-bounded: a positive witness exits
early, a negative answer needs the restricted clone to close.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import (
    DEFAULT_CAP,
    FiniteAlgebra,
    Term,
    poly_clone_on_points,
    unary_poly_clone,
)
from .commutator import commutator
from .congruence import CongruenceLattice, congruence_lattice
from .errors import CapExceeded, Tri, UntypedLattice
from .partition import Partition


@dataclass
class MinimalSet:
    quotient: tuple[Partition, Partition]
    elements: tuple[int, ...]
    idempotent: Optional[tuple[int, ...]]        # table of e_U, e_U(A) = U
    idempotent_witness: Optional[Term]
    traces: list[tuple[int, ...]]
    body: tuple[int, ...]
    tail: tuple[int, ...]


TYPE_UNKNOWN = None  # a cap-bounded search came back undecided


def minimal_sets(
    alg: FiniteAlgebra, alpha: Partition, beta: Partition, cap: int = DEFAULT_CAP
) -> list[MinimalSet]:
    """Inclusion-minimal ranges f(A), |f(A)| >= 2, f in Pol_1, f(beta) !<= alpha."""
    if not alpha.leq(beta) or alpha == beta:
        raise ValueError("need alpha < beta")
    clone = unary_poly_clone(alg, cap)
    n = alg.size
    bpairs = [(a, b) for a in range(n) for b in range(a + 1, n) if beta.same(a, b)]
    qualifying: dict[frozenset, tuple[int, ...]] = {}
    for tab in clone.tables:
        rng = frozenset(tab)
        if len(rng) < 2:
            continue
        if any(not alpha.same(tab[a], tab[b]) for a, b in bpairs):
            qualifying.setdefault(rng, tab)
    minimal = [
        rng
        for rng in qualifying
        if not any(other < rng for other in qualifying)
    ]
    out = []
    for rng in sorted(minimal, key=lambda r: (len(r), sorted(r))):
        u = tuple(sorted(rng))
        uset = set(u)
        e_tab = None
        e_wit = None
        for tab in clone.tables:
            if set(tab) == uset and all(tab[tab[x]] == tab[x] for x in range(n)):
                e_tab = tab
                e_wit = clone.witness(tab)
                break
        traces = _traces(alpha, beta, u)
        body = tuple(sorted(set().union(*traces))) if traces else ()
        tail = tuple(x for x in u if x not in body)
        out.append(MinimalSet((alpha, beta), u, e_tab, e_wit, traces, body, tail))
    return out


def _traces(alpha: Partition, beta: Partition, u: Sequence[int]) -> list[tuple[int, ...]]:
    by_beta: dict[int, list[int]] = {}
    for x in u:
        by_beta.setdefault(beta.class_of(x), []).append(x)
    traces = []
    for cls in by_beta.values():
        if len({alpha.class_of(x) for x in cls}) >= 2:
            traces.append(tuple(sorted(cls)))
    return traces


def polynomially_isomorphic(
    alg: FiniteAlgebra, u: Sequence[int], v: Sequence[int], cap: int = DEFAULT_CAP
) -> bool:
    """Unary polynomials f, g with f(U)=V, g(V)=U, g.f = id on U, f.g = id on V."""
    clone = unary_poly_clone(alg, cap)
    uset, vset = set(u), set(v)
    fwd = [t for t in clone.tables if {t[x] for x in uset} == vset]
    bwd = [t for t in clone.tables if {t[x] for x in vset} == uset]
    for f in fwd:
        for g in bwd:
            if all(g[f[x]] == x for x in uset) and all(f[g[y]] == y for y in vset):
                return True
    return False


# ---------------------------------------------------------------------------
# Restricted clone searches


def _restricted_clone(alg, pts, k, cap, stop=None):
    return poly_clone_on_points(alg, pts, k, cap, stop=stop)


def _find_pseudo_malcev(
    alg: FiniteAlgebra, u: Sequence[int], body: Sequence[int], cap: int
) -> Tri:
    """Ternary polynomial behaving like a Malcev operation on the body:
    d(x,x,x)=x on U, d(x,x,y)=y=d(y,x,x) for x in body, y in U, the three
    one-variable slices at body pairs permute U, and the body is closed."""
    u = tuple(u)
    bset = set(body)
    uset = set(u)
    pts = list(itertools.product(u, repeat=3))
    pos = {p: i for i, p in enumerate(pts)}

    def ok(tab: tuple[int, ...]) -> bool:
        if any(v not in uset for v in tab):
            return False
        for x in u:
            if tab[pos[(x, x, x)]] != x:
                return False
        for x in bset:
            for y in u:
                if tab[pos[(x, x, y)]] != y or tab[pos[(y, x, x)]] != y:
                    return False
        for a in bset:
            for b in bset:
                for slicer in (
                    lambda x: (x, a, b),
                    lambda x: (a, x, b),
                    lambda x: (a, b, x),
                ):
                    vals = {tab[pos[slicer(x)]] for x in u}
                    if vals != uset:
                        return False
        if any(tab[pos[(a, b, c)]] not in bset
               for a in bset for b in bset for c in bset):
            return False
        return True

    clone, hit = _restricted_clone(alg, pts, 3, cap, stop=ok)
    if hit is not None:
        return Tri.YES
    return Tri.NO if clone.complete else Tri.UNKNOWN


def _lattice_ops_on_trace(
    alg: FiniteAlgebra, u: Sequence[int], trace: Sequence[int], cap: int
) -> tuple[Tri, Tri]:
    """(meet-and-join present, exactly-a-semilattice-op present) on the trace,
    orientation-free: a meet for one ordering is a join for the other, so the
    pair condition is that both lattice tables appear with range inside U."""
    n0, n1 = sorted(trace)
    uset = set(u)
    pts = [(n0, n0), (n0, n1), (n1, n0), (n1, n1)]
    meet_pat = (n0, n0, n0, n1)
    join_pat = (n0, n1, n1, n1)

    found = {"meet": False, "join": False}

    def check(tab: tuple[int, ...]) -> bool:
        if any(v not in uset for v in tab):
            return False
        if tab == meet_pat:
            found["meet"] = True
        elif tab == join_pat:
            found["join"] = True
        return found["meet"] and found["join"]

    clone, hit = _restricted_clone(alg, pts, 2, cap, stop=check)
    if hit is not None:
        return Tri.YES, Tri.NO
    both = Tri.NO if clone.complete else Tri.UNKNOWN
    one = found["meet"] or found["join"]
    if clone.complete:
        semi = Tri.YES if one else Tri.NO
    else:
        semi = Tri.YES if one else Tri.UNKNOWN
    return both, semi


def _has_complement(alg: FiniteAlgebra, u: Sequence[int], trace: Sequence[int], cap: int) -> Tri:
    """Unary polynomial with range exactly U swapping the trace elements."""
    n0, n1 = sorted(trace)
    uset = set(u)
    clone = unary_poly_clone(alg, cap)
    for tab in clone.tables:
        if set(tab) == uset and tab[n0] == n1 and tab[n1] == n0:
            return Tri.YES
    return Tri.NO


def type_of(
    alg: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    cap: int = DEFAULT_CAP,
    all_traces: bool = False,
) -> Optional[int]:
    """Label in 1..5 for the quotient alpha < beta, or None when undecided.

    Ladder: beta abelian over alpha splits 2 (pseudo-Malcev on a minimal-set
    body) from 1; otherwise lattice operations on a trace give 4, plus a
    polynomial complement 3, and a lone semilattice operation gives 5.
    """
    try:
        msets = minimal_sets(alg, alpha, beta, cap)
    except CapExceeded:
        return TYPE_UNKNOWN
    if not msets:
        return TYPE_UNKNOWN
    abelian_over = commutator(alg, beta, beta).leq(alpha)
    labels = set()
    for ms in msets[: None if all_traces else 1]:
        if abelian_over:
            pm = _find_pseudo_malcev(alg, ms.elements, ms.body or ms.elements, cap)
            if pm is Tri.UNKNOWN:
                return TYPE_UNKNOWN
            labels.add(2 if pm is Tri.YES else 1)
            continue
        traces = ms.traces or [ms.elements]
        for tr in traces if all_traces else traces[:1]:
            if len(tr) != 2:
                return TYPE_UNKNOWN
            both, semi = _lattice_ops_on_trace(alg, ms.elements, tr, cap)
            if both is Tri.YES:
                comp = _has_complement(alg, ms.elements, tr, cap)
                if comp is Tri.UNKNOWN:
                    return TYPE_UNKNOWN
                labels.add(3 if comp is Tri.YES else 4)
            elif both is Tri.NO and semi is Tri.YES:
                labels.add(5)
            else:
                return TYPE_UNKNOWN
    if len(labels) != 1:
        return TYPE_UNKNOWN
    return labels.pop()


@dataclass
class TypedLattice:
    lattice: CongruenceLattice
    labels: dict[tuple[int, int], Optional[int]]  # cover (lo, hi) index pair -> label

    def label(self, lo: Partition, hi: Partition) -> Optional[int]:
        return self.labels[(self.lattice.index(lo), self.lattice.index(hi))]

    @property
    def fully_typed(self) -> bool:
        return all(v is not None for v in self.labels.values())

    def typeset(self) -> set:
        return set(self.labels.values())


def typed_congruence_lattice(alg: FiniteAlgebra, cap: int = DEFAULT_CAP,
                             lat: Optional[CongruenceLattice] = None) -> TypedLattice:
    lat = lat or congruence_lattice(alg)
    labels = {}
    for i, j in lat.covers:
        labels[(i, j)] = type_of(alg, lat.congruences[i], lat.congruences[j], cap)
    return TypedLattice(lat, labels)


def typeset(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> set:
    """Union of cover-pair labels over Con(alg); may contain None when a
    label search capped out."""
    return typed_congruence_lattice(alg, cap).typeset()


# ---------------------------------------------------------------------------
# Transfer principles


@dataclass
class AbstractTypedLattice:
    """A finite poset with labeled covers, for transfer checks on synthetic
    data as well as on real congruence lattices."""

    elements: list[str]
    leq: dict[tuple[str, str], bool]
    cover_labels: dict[tuple[str, str], int]

    def covers_above(self, a: str) -> list[tuple[str, int]]:
        return [(b, t) for (x, b), t in self.cover_labels.items() if x == a]


def abstract_from_typed(tl: TypedLattice) -> AbstractTypedLattice:
    lat = tl.lattice
    names = [str(p) for p in lat.congruences]
    leq = {}
    for i, p in enumerate(lat.congruences):
        for j, q in enumerate(lat.congruences):
            leq[(names[i], names[j])] = p.leq(q)
    labels = {}
    for (i, j), t in tl.labels.items():
        if t is None:
            raise UntypedLattice("cover label unknown")
        labels[(names[i], names[j])] = t
    return AbstractTypedLattice(names, leq, labels)


def transfer_check(
    atl: AbstractTypedLattice, i: int, j: int
) -> tuple[bool, Optional[tuple[str, str, str]]]:
    """(i,j)-transfer: every chain a -<(i) b -<(j) c admits b' with
    a -<(j) b' <= c.  Returns the first violating chain otherwise."""
    for (a, b), t1 in atl.cover_labels.items():
        if t1 != i:
            continue
        for (b2, c), t2 in atl.cover_labels.items():
            if b2 != b or t2 != j:
                continue
            ok = any(
                t == j and atl.leq[(bp, c)]
                for bp, t in atl.covers_above(a)
            )
            if not ok:
                return False, (a, b, c)
    return True, None


def transfer_principle_holds(
    alg: FiniteAlgebra, i: int, j: int, cap: int = DEFAULT_CAP
) -> tuple[bool, Optional[tuple[str, str, str]]]:
    tl = typed_congruence_lattice(alg, cap)
    if not tl.fully_typed:
        raise UntypedLattice(f"could not label every cover of Con({alg.name})")
    return transfer_check(abstract_from_typed(tl), i, j)
