import pytest

from mvcirc.partition import Partition
from mvcirc.zoo import get


@pytest.fixture(scope="session")
def z2():
    return get("Z2")


@pytest.fixture(scope="session")
def z3():
    return get("Z3")


@pytest.fixture(scope="session")
def z4():
    return get("Z4")


@pytest.fixture(scope="session")
def z6():
    return get("Z6")


@pytest.fixture(scope="session")
def z2xz2():
    return get("Z2xZ2")


@pytest.fixture(scope="session")
def s3():
    return get("S3")


@pytest.fixture(scope="session")
def lat2():
    return get("2lattice")


@pytest.fixture(scope="session")
def semi2():
    return get("2semilattice")


@pytest.fixture(scope="session")
def bool2():
    return get("2boolean")


@pytest.fixture(scope="session")
def z4ring():
    return get("Z4ring")


@pytest.fixture(scope="session")
def majority():
    return get("majority")


@pytest.fixture(scope="session")
def z2xl2():
    return get("Z2xL2")


@pytest.fixture(scope="session")
def trivial():
    return get("trivial")


def all_partitions(n):
    """Every partition of {0..n-1}: independent oracle for lattice tests."""
    if n == 0:
        yield Partition(())
        return
    for p in all_partitions(n - 1):
        k = p.num_classes
        for c in range(k + 1):
            yield Partition.from_ids(p.ids + (c,))


def mod_congruence(n, m):
    """x ~ y iff x = y (mod m), over universe 0..n-1."""
    return Partition.from_ids(tuple(x % m for x in range(n)))


# ---------------------------------------------------------------------------
# Exhaustive small-circuit enumeration over the majority fixture.
#
# Independent of the package: the fixture is a subalgebra of ({0,1}, maj)^3,
# so a polynomial acts coordinatewise and a gate value is a triple of 8-bit
# masks (one monotone Boolean function of the three inputs per coordinate).
# States are frozensets of gate tables; every table in a reachable state of
# size <= budget is the output of some circuit with that many gates.

_MAJ_ELEMS = [(1, 1, 1), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


def _maj_mask_triple_inputs():
    # input gate for variable v: coordinate i sees bit v of the index (x,y,z)
    masks = []
    for v in range(3):
        shift = 2 - v
        mask = 0
        for idx in range(8):
            if (idx >> shift) & 1:
                mask |= 1 << idx
        masks.append((mask, mask, mask))
    return masks


def _maj_mask_const(elem):
    return tuple(0xFF if bit else 0 for bit in elem)


def _maj_apply(a, b, c):
    return tuple((x & y) | (y & z) | (z & x) for x, y, z in zip(a, b, c))


def majority_small_circuit_tables(max_gates=6):
    """Every gate function reachable by a circuit with at most max_gates
    gates (inputs and constants count) over the majority fixture."""
    base = _maj_mask_triple_inputs() + [_maj_mask_const(e) for e in _MAJ_ELEMS]
    seen_states = set()
    tables = set()
    stack = [frozenset()]
    seen_states.add(frozenset())
    while stack:
        state = stack.pop()
        tables.update(state)
        if len(state) >= max_gates:
            continue
        members = sorted(state)
        candidates = {t for t in base if t not in state}
        for a in members:
            for b in members:
                for c in members:
                    t = _maj_apply(a, b, c)
                    if t not in state:
                        candidates.add(t)
        for t in candidates:
            nxt = state | {t}
            if nxt not in seen_states:
                seen_states.add(nxt)
                stack.append(nxt)
    return tables


def maj_table_eval(table, x, y, z):
    """Evaluate a mask-triple table at elements of the majority fixture
    (given as indices into the 4-element universe)."""
    ex, ey, ez = _MAJ_ELEMS[x], _MAJ_ELEMS[y], _MAJ_ELEMS[z]
    out = []
    for i in range(3):
        idx = (ex[i] << 2) | (ey[i] << 1) | ez[i]
        out.append((table[i] >> idx) & 1)
    return _MAJ_ELEMS.index(tuple(out))
