"""Finite algebras given by operation tables, terms, and bounded clone search.

Operation tables are flat row-major arrays indexed by mixed-radix argument
tuples (last argument varies fastest), which keeps evaluation O(1) and the
closure loops cache-friendly.  Universe elements are always the dense
integers 0..n-1; named elements in input files are renumbered on load.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .errors import (
    CapExceeded,
    ElementOutOfRange,
    NotACongruence,
    ParseError,
    SizeNot2,
    Tri,
    UnboundVariable,
    UnknownOp,
)
from .partition import Partition

DEFAULT_CAP = 200_000


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: tuple[int, ...]

    def index(self, args: Sequence[int], size: int) -> int:
        idx = 0
        for a in args:
            idx = idx * size + a
        return idx

    def apply(self, args: Sequence[int], size: int) -> int:
        return self.table[self.index(args, size)]


@dataclass(frozen=True)
class FiniteAlgebra:
    name: str
    size: int
    ops: tuple[Operation, ...]

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("algebra size must be >= 1")
        names = [op.name for op in self.ops]
        if len(set(names)) != len(names):
            raise ValueError("duplicate operation names")
        for op in self.ops:
            if op.arity < 0:
                raise ValueError(f"op {op.name}: negative arity")
            if len(op.table) != self.size ** op.arity:
                raise ValueError(
                    f"op {op.name}: table has {len(op.table)} entries, "
                    f"expected {self.size ** op.arity}"
                )
            for v in op.table:
                if not 0 <= v < self.size:
                    raise ValueError(f"op {op.name}: table entry {v} out of range")

    def op(self, name: str) -> Operation:
        for op in self.ops:
            if op.name == name:
                return op
        raise UnknownOp(f"algebra {self.name} has no operation {name!r}")

    def has_op(self, name: str) -> bool:
        return any(op.name == name for op in self.ops)

    @property
    def universe(self) -> range:
        return range(self.size)

    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple((op.name, op.arity) for op in self.ops)

    def rename(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(name, self.size, self.ops)


def make_algebra(name: str, size: int, ops: Iterable[tuple[str, int, Sequence[int]]]) -> FiniteAlgebra:
    return FiniteAlgebra(name, size, tuple(Operation(n, a, tuple(t)) for n, a, t in ops))


def op_from_fn(name: str, arity: int, size: int, fn: Callable[..., int]) -> Operation:
    table = tuple(fn(*args) for args in itertools.product(range(size), repeat=arity))
    return Operation(name, arity, table)


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()

    def variables(self) -> set[int]:
        out: set[int] = set()
        _collect_vars(self, out)
        return out


@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class Const(Term):
    value: int


@dataclass(frozen=True)
class App(Term):
    op: str
    args: tuple[Term, ...]


def _collect_vars(t: Term, out: set[int]) -> None:
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.index)
        elif isinstance(node, App):
            stack.extend(node.args)


def term_size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(term_size(a) for a in t.args)
    return 1


def term_str(t: Term) -> str:
    if isinstance(t, Var):
        return f"x{t.index}"
    if isinstance(t, Const):
        return f"c{t.value}"
    assert isinstance(t, App)
    return f"{t.op}({', '.join(term_str(a) for a in t.args)})"


def eval_term(alg: FiniteAlgebra, t: Term, asg: Sequence[int]) -> int:
    """Evaluate t bottom-up under the variable binding asg (indexed by Var.index)."""
    if isinstance(t, Var):
        if t.index >= len(asg):
            raise UnboundVariable(f"variable x{t.index} not bound")
        v = asg[t.index]
    elif isinstance(t, Const):
        v = t.value
    else:
        assert isinstance(t, App)
        op = alg.op(t.op)
        if len(t.args) != op.arity:
            raise UnknownOp(f"op {t.op} expects {op.arity} arguments, got {len(t.args)}")
        args = [eval_term(alg, a, asg) for a in t.args]
        return op.apply(args, alg.size)
    if not 0 <= v < alg.size:
        raise ElementOutOfRange(f"element {v} out of range for size {alg.size}")
    return v


# ---------------------------------------------------------------------------
# Clone closure
#
# A k-ary polynomial table is the tuple of values of a polynomial on a fixed
# list of argument points.  Closure starts from the projections (and, for
# polynomial clones, the constants) and repeatedly applies every basic
# operation pointwise to tuples of stored tables.  First-witness terms are
# retained because reductions and the type-labeling machinery need them.


@dataclass
class Clone:
    """Result of a bounded clone closure over a fixed point list."""

    arity: int
    points: tuple[tuple[int, ...], ...]
    tables: list[tuple[int, ...]]
    witnesses: dict[tuple[int, ...], Term]
    complete: bool

    def __contains__(self, table: Sequence[int]) -> bool:
        return tuple(table) in self.witnesses

    def witness(self, table: Sequence[int]) -> Term:
        return self.witnesses[tuple(table)]

    def __len__(self) -> int:
        return len(self.tables)


def _close_tables(
    alg: FiniteAlgebra,
    points: Sequence[tuple[int, ...]],
    generators: list[tuple[tuple[int, ...], Term]],
    cap: int,
    stop: Optional[Callable[[tuple[int, ...]], bool]] = None,
) -> tuple[Clone, Optional[tuple[int, ...]]]:
    """Worklist closure of generator tables under pointwise basic operations.

    Returns the clone and, if stop matched a table, that table (closure halts
    there and the clone is marked incomplete).
    """
    size = alg.size
    npts = len(points)
    tables: list[tuple[int, ...]] = []
    witnesses: dict[tuple[int, ...], Term] = {}
    for tab, wit in generators:
        if tab not in witnesses:
            witnesses[tab] = wit
            tables.append(tab)
            if stop is not None and stop(tab):
                return Clone(len(points[0]) if points else 0, tuple(points), tables, witnesses, False), tab
    ops = [op for op in alg.ops]
    frontier_start = 0
    while frontier_start < len(tables):
        frontier_end = len(tables)
        for op in ops:
            r = op.arity
            if r == 0:
                const = op.table[0]
                tab = (const,) * npts
                if tab not in witnesses:
                    witnesses[tab] = App(op.name, ())
                    tables.append(tab)
                continue
            optab = op.table
            # every r-tuple with at least one component in the new frontier
            for combo in itertools.product(range(frontier_end), repeat=r):
                if max(combo) < frontier_start:
                    continue
                args = [tables[i] for i in combo]
                if r == 1:
                    t0 = args[0]
                    tab = tuple(optab[t0[p]] for p in range(npts))
                elif r == 2:
                    t0, t1 = args
                    tab = tuple(optab[t0[p] * size + t1[p]] for p in range(npts))
                else:
                    tab = tuple(
                        optab[_mixed_radix(tuple(a[p] for a in args), size)]
                        for p in range(npts)
                    )
                if tab in witnesses:
                    continue
                if len(tables) >= cap:
                    return Clone(len(points[0]) if points else 0, tuple(points), tables, witnesses, False), None
                witnesses[tab] = App(op.name, tuple(witnesses[a] for a in args))
                tables.append(tab)
                if stop is not None and stop(tab):
                    return Clone(len(points[0]) if points else 0, tuple(points), tables, witnesses, False), tab
        frontier_start = frontier_end
    return Clone(len(points[0]) if points else 0, tuple(points), tables, witnesses, True), None


def _mixed_radix(args: tuple[int, ...], size: int) -> int:
    idx = 0
    for a in args:
        idx = idx * size + a
    return idx


def _proj_generators(
    alg: FiniteAlgebra, points: Sequence[tuple[int, ...]], k: int, constants: bool
) -> list[tuple[tuple[int, ...], Term]]:
    gens: list[tuple[tuple[int, ...], Term]] = []
    for i in range(k):
        gens.append((tuple(p[i] for p in points), Var(i)))
    if constants:
        for c in range(alg.size):
            gens.append(((c,) * len(points), Const(c)))
    return gens


def poly_clone_on_points(
    alg: FiniteAlgebra,
    points: Sequence[tuple[int, ...]],
    k: int,
    cap: int = DEFAULT_CAP,
    stop: Optional[Callable[[tuple[int, ...]], bool]] = None,
    constants: bool = True,
) -> tuple[Clone, Optional[tuple[int, ...]]]:
    """Polynomial (or term, with constants=False) clone restricted to a point list."""
    return _close_tables(alg, list(points), _proj_generators(alg, points, k, constants), cap, stop)


_clone_cache: dict[tuple, Clone] = {}


def kary_poly_clone(alg: FiniteAlgebra, k: int, cap: int = DEFAULT_CAP) -> Clone:
    """All k-ary polynomial tables of alg, with first-witness terms.

    Raises CapExceeded when the closure would grow past cap.  Results are
    cached per algebra (clones are immutable; callers must not mutate).
    """
    key = (alg.size, alg.signature(), tuple(op.table for op in alg.ops), k)
    cached = _clone_cache.get(key)
    if cached is not None and cached.complete:
        return cached
    points = list(itertools.product(range(alg.size), repeat=k))
    clone, _ = poly_clone_on_points(alg, points, k, cap)
    if not clone.complete:
        raise CapExceeded(len(clone), f"{k}-ary polynomial clone of {alg.name}")
    _clone_cache[key] = clone
    return clone


def unary_poly_clone(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> Clone:
    return kary_poly_clone(alg, 1, cap)


# ---------------------------------------------------------------------------
# Special term search (Malcev, directed Gumm chains)


@dataclass
class Search:
    """Outcome of a cap-bounded existence search."""

    status: Tri
    value: object = None

    @property
    def found(self) -> bool:
        return self.status is Tri.YES


def _is_malcev_table(tab: Sequence[int], size: int) -> bool:
    # table indexed by (x, y, z) with z fastest
    n2 = size * size
    for x in range(size):
        for y in range(size):
            if tab[x * n2 + x * size + y] != y:
                return False
            if tab[y * n2 + x * size + x] != y:
                return False
    return True


_malcev_cache: dict[tuple, Search] = {}


def find_malcev_term(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> Search:
    """Search the ternary term clone for d with d(x,x,y) = y = d(y,x,x).

    YES carries (term, table); NO means the closure completed without a
    witness; UNKNOWN means the cap was hit first.
    """
    key = (alg.size, alg.signature(), tuple(op.table for op in alg.ops))
    cached = _malcev_cache.get(key)
    if cached is not None and cached.status is not Tri.UNKNOWN:
        return cached
    n = alg.size
    points = list(itertools.product(range(n), repeat=3))
    clone, hit = poly_clone_on_points(
        alg, points, 3, cap, stop=lambda t: _is_malcev_table(t, n), constants=False
    )
    if hit is not None:
        result = Search(Tri.YES, (clone.witness(hit), hit))
    elif clone.complete:
        result = Search(Tri.NO)
    else:
        result = Search(Tri.UNKNOWN)
    _malcev_cache[key] = result
    return result


@dataclass
class GummChain:
    terms: list[Term]          # d_1 .. d_n
    q: Term
    tables: list[tuple[int, ...]]
    q_table: tuple[int, ...]


def find_directed_gumm_terms(
    alg: FiniteAlgebra, max_n: Optional[int] = None, cap: int = DEFAULT_CAP
) -> Search:
    """Search ternary terms for a directed chain d_1..d_n, Q with
    d_i(x,y,x)=x, d_1(x,x,y)=x, d_i(x,y,y)=d_{i+1}(x,x,y), d_n(x,y,y)=Q(x,y,y),
    Q(x,x,y)=y, chain length <= max_n.

    With max_n=None the search is complete: any chain can be spliced down to
    one visiting each candidate table at most once, so exhausting the visited
    set decides existence.  A Malcev term short-circuits the search:
    (d_1, Q) = (first projection, d) satisfies all the displayed identities.
    """
    n = alg.size
    n2 = n * n

    malcev = find_malcev_term(alg, cap)
    if malcev.status is Tri.YES:
        term, table = malcev.value  # type: ignore[misc]
        proj1 = Var(0)
        proj1_table = tuple(p[0] for p in itertools.product(range(n), repeat=3))
        return Search(Tri.YES, GummChain([proj1], term, [proj1_table], table))

    points = list(itertools.product(range(n), repeat=3))
    clone, _ = poly_clone_on_points(alg, points, 3, cap, constants=False)
    if not clone.complete:
        return Search(Tri.UNKNOWN)

    def slice_xyx_ok(tab: Sequence[int]) -> bool:
        return all(tab[x * n2 + y * n + x] == x for x in range(n) for y in range(n))

    def slice_xxy(tab: Sequence[int]) -> tuple[int, ...]:
        return tuple(tab[x * n2 + x * n + y] for x in range(n) for y in range(n))

    def slice_xyy(tab: Sequence[int]) -> tuple[int, ...]:
        return tuple(tab[x * n2 + y * n + y] for x in range(n) for y in range(n))

    id_xxy = tuple(x for x in range(n) for _ in range(n))          # (x,y) -> x
    sel_y = tuple(y for _ in range(n) for y in range(n))           # (x,y) -> y

    nodes = [t for t in clone.tables if slice_xyx_ok(t)]
    q_by_xyy: dict[tuple[int, ...], tuple[int, ...]] = {}
    for t in clone.tables:
        if slice_xxy(t) == sel_y:
            q_by_xyy.setdefault(slice_xyy(t), t)

    # BFS over nodes: start where d(x,x,y)=x; step t -> u when u(x,x,y)=t(x,y,y)
    by_xxy: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for t in nodes:
        by_xxy.setdefault(slice_xxy(t), []).append(t)

    start = [t for t in nodes if slice_xxy(t) == id_xxy]
    prev: dict[tuple[int, ...], Optional[tuple[int, ...]]] = {t: None for t in start}
    frontier = list(start)
    depth = 1
    limit = max_n if max_n is not None else max(len(nodes), 1)
    while frontier and depth <= limit:
        for t in frontier:
            q = q_by_xyy.get(slice_xyy(t))
            if q is not None:
                chain = []
                cur: Optional[tuple[int, ...]] = t
                while cur is not None:
                    chain.append(cur)
                    cur = prev[cur]
                chain.reverse()
                return Search(
                    Tri.YES,
                    GummChain(
                        [clone.witness(c) for c in chain],
                        clone.witness(q),
                        chain,
                        q,
                    ),
                )
        nxt = []
        for t in frontier:
            for u in by_xxy.get(slice_xyy(t), []):
                if u not in prev:
                    prev[u] = t
                    nxt.append(u)
        frontier = nxt
        depth += 1
    return Search(Tri.NO)


def check_gumm_chain(alg: FiniteAlgebra, chain: GummChain) -> bool:
    """Pointwise verification of every chain identity on the full universe."""
    n = alg.size

    def ev(t: Term, x: int, y: int, z: int) -> int:
        return eval_term(alg, t, (x, y, z))

    ds, q = chain.terms, chain.q
    for x in range(n):
        for y in range(n):
            if ev(ds[0], x, x, y) != x:
                return False
            if ev(q, x, x, y) != y:
                return False
            if ev(ds[-1], x, y, y) != ev(q, x, y, y):
                return False
            for d in ds:
                if ev(d, x, y, x) != x:
                    return False
            for d1, d2 in zip(ds, ds[1:]):
                if ev(d1, x, y, y) != ev(d2, x, x, y):
                    return False
    return True


# ---------------------------------------------------------------------------
# Quotients, products, induced structure


def is_congruence(alg: FiniteAlgebra, p: Partition) -> bool:
    if p.n != alg.size:
        return False
    n = alg.size
    for op in alg.ops:
        r = op.arity
        if r == 0:
            continue
        # one-position substitution suffices for congruence closure
        for pos in range(r):
            for ctx in itertools.product(range(n), repeat=r - 1):
                prefix, suffix = ctx[:pos], ctx[pos:]
                vals = [op.apply(prefix + (x,) + suffix, n) for x in range(n)]
                for cls in p.classes():
                    rep = vals[cls[0]]
                    for x in cls[1:]:
                        if not p.same(vals[x], rep):
                            return False
    return True


def quotient(alg: FiniteAlgebra, theta: Partition, check: bool = True) -> FiniteAlgebra:
    """Quotient algebra; classes are numbered in canonical (first occurrence) order."""
    if check and not is_congruence(alg, theta):
        raise NotACongruence(f"partition {theta} is not a congruence of {alg.name}")
    n = alg.size
    k = theta.num_classes
    reps = [cls[0] for cls in theta.classes()]
    ops = []
    for op in alg.ops:
        table = tuple(
            theta.class_of(op.apply(tuple(reps[c] for c in args), n))
            for args in itertools.product(range(k), repeat=op.arity)
        )
        ops.append(Operation(op.name, op.arity, table))
    return FiniteAlgebra(f"{alg.name}/{theta}", k, tuple(ops))


def direct_product(a: FiniteAlgebra, b: FiniteAlgebra, name: str | None = None) -> FiniteAlgebra:
    """Product with universe numbered row-major: (i, j) -> i*|B| + j."""
    if a.signature() != b.signature():
        raise ValueError("direct product requires matching signatures")
    na, nb = a.size, b.size
    size = na * nb
    ops = []
    for opa, opb in zip(a.ops, b.ops):
        r = opa.arity
        table = []
        for args in itertools.product(range(size), repeat=r):
            ai = tuple(x // nb for x in args)
            bi = tuple(x % nb for x in args)
            table.append(opa.apply(ai, na) * nb + opb.apply(bi, nb))
        ops.append(Operation(opa.name, r, tuple(table)))
    return FiniteAlgebra(name or f"{a.name}x{b.name}", size, tuple(ops))


@dataclass
class InducedSummary:
    """What the polynomial clone realizes on a 2-element subset {u0 < u1}."""

    pair: tuple[int, int]
    has_meet: bool
    has_join: bool
    has_negation: bool
    all_unary_monotone: bool


def induced_on_pair_set(alg: FiniteAlgebra, pair: Sequence[int], cap: int = DEFAULT_CAP) -> InducedSummary:
    u0, u1 = sorted(pair)
    if not (0 <= u0 < alg.size and 0 <= u1 < alg.size and u0 != u1):
        raise ElementOutOfRange(f"bad pair {pair}")
    pts2 = [(u0, u0), (u0, u1), (u1, u0), (u1, u1)]
    clone2, _ = poly_clone_on_points(alg, pts2, 2, cap)
    if not clone2.complete:
        raise CapExceeded(len(clone2), "binary clone on pair")
    meet = (u0, u0, u0, u1)
    join = (u0, u1, u1, u1)
    has_meet = meet in clone2.witnesses
    has_join = join in clone2.witnesses
    pts1 = [(u0,), (u1,)]
    clone1, _ = poly_clone_on_points(alg, pts1, 1, cap)
    has_neg = (u1, u0) in clone1.witnesses
    mono = True
    for tab in clone1.tables:
        if set(tab) <= {u0, u1} and (tab[0], tab[1]) == (u1, u0):
            mono = False
            break
    return InducedSummary((u0, u1), has_meet, has_join, has_neg, mono)


def is_poly_equiv_to_2lattice(alg2: FiniteAlgebra, cap: int = DEFAULT_CAP) -> bool:
    """A 2-element algebra is polynomially equivalent to the 2-element lattice
    iff its binary polynomials include meet and join for one of the two
    orderings and no unary polynomial is the negation."""
    if alg2.size != 2:
        raise SizeNot2(f"algebra {alg2.name} has size {alg2.size}")
    summary = induced_on_pair_set(alg2, (0, 1), cap)
    # meet for one ordering is join for the other, so the orientation-free
    # condition is: both lattice tables present and no negation.
    return summary.has_meet and summary.has_join and not summary.has_negation


# ---------------------------------------------------------------------------
# Algebra text format
#
#   algebra <name> size <n>
#   op <name> arity <k>
#   <n^k whitespace-separated entries, row-major, last argument fastest>
#
# '#' starts a comment.  Round-trips bit-exactly through serialize/parse.


def serialize_algebra(alg: FiniteAlgebra) -> str:
    lines = [f"algebra {alg.name} size {alg.size}"]
    for op in alg.ops:
        lines.append(f"op {op.name} arity {op.arity}")
        if op.arity == 0:
            lines.append(str(op.table[0]))
            continue
        per_line = alg.size if op.arity >= 2 else len(op.table)
        for start in range(0, len(op.table), per_line):
            lines.append(" ".join(str(v) for v in op.table[start:start + per_line]))
    return "\n".join(lines) + "\n"


def parse_algebra(text: str) -> FiniteAlgebra:
    tokens: list[tuple[str, int]] = []  # (token, line number)
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for tok in line.split():
            tokens.append((tok, ln))
    pos = 0

    def take(expect: str | None = None) -> tuple[str, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", tokens[-1][1] if tokens else 1)
        tok, ln = tokens[pos]
        pos += 1
        if expect is not None and tok != expect:
            raise ParseError(f"expected {expect!r}, got {tok!r}", ln)
        return tok, ln

    take("algebra")
    name, _ = take()
    take("size")
    stok, ln = take()
    try:
        size = int(stok)
    except ValueError:
        raise ParseError(f"bad size {stok!r}", ln) from None
    ops = []
    while pos < len(tokens):
        take("op")
        opname, _ = take()
        take("arity")
        atok, ln = take()
        try:
            arity = int(atok)
        except ValueError:
            raise ParseError(f"bad arity {atok!r}", ln) from None
        count = size ** arity
        entries = []
        for _ in range(count):
            etok, eln = take()
            try:
                v = int(etok)
            except ValueError:
                raise ParseError(f"bad table entry {etok!r}", eln) from None
            if not 0 <= v < size:
                raise ParseError(f"table entry {v} out of range 0..{size - 1}", eln)
            entries.append(v)
        ops.append(Operation(opname, arity, tuple(entries)))
    try:
        return FiniteAlgebra(name, size, tuple(ops))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
