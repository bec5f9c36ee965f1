import json

import pytest

from mvcirc.algebra import direct_product
from mvcirc.errors import Tri
from mvcirc.partition import Partition
from mvcirc.structure import (
    classify,
    decompose_nd,
    is_dl_like,
    is_poly_equiv_to_some_lattice,
    radical,
)
from mvcirc.tct import typed_congruence_lattice, typeset
from mvcirc.zoo import get, zoo



# ---------------------------------------------------------------------------
# Radicals


def test_radicals_z2xl2(z2xl2):
    typed = typed_congruence_lattice(z2xl2)
    rho2 = radical(z2xl2, typed, 2)
    rho4 = radical(z2xl2, typed, 4)
    # elements are (a, d) numbered a*2 + d; kernel of the lattice projection
    # glues (0,d) with (1,d), kernel of the group projection glues (a,0),(a,1)
    ker_lattice_proj = Partition.from_ids([0, 1, 0, 1])
    ker_group_proj = Partition.from_ids([0, 0, 1, 1])
    assert rho2 == ker_lattice_proj
    assert rho4 == ker_group_proj


def test_radicals_z6(z6):
    typed = typed_congruence_lattice(z6)
    assert radical(z6, typed, 2) == Partition.one(6)
    assert radical(z6, typed, 4) == Partition.zero(6)


def test_radicals_2boolean(bool2):
    typed = typed_congruence_lattice(bool2)
    assert radical(bool2, typed, 2) == Partition.zero(2)
    assert radical(bool2, typed, 4) == Partition.zero(2)


def test_radical_quotients_have_pure_typesets(z2xl2):
    from mvcirc.algebra import quotient

    typed = typed_congruence_lattice(z2xl2)
    rho2 = radical(z2xl2, typed, 2)
    rho4 = radical(z2xl2, typed, 4)
    assert typeset(quotient(z2xl2, rho4)) <= {2}
    assert typeset(quotient(z2xl2, rho2)) <= {4}


# ---------------------------------------------------------------------------
# Decomposition


def _iso_tables_2(a, b):
    """Whether two 2-element algebras with equal signatures are isomorphic."""
    if a.signature() != b.signature():
        return False
    for perm in ([0, 1], [1, 0]):
        ok = True
        for opa, opb in zip(a.ops, b.ops):
            n = 2
            import itertools

            for args in itertools.product(range(2), repeat=opa.arity):
                mapped = tuple(perm[x] for x in args)
                if perm[opa.apply(args, n)] != opb.apply(mapped, n):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def test_decompose_z2xl2_recovers_factors(z2xl2):
    dec = decompose_nd(z2xl2)
    assert dec is not None
    assert dec.n_factor.size == 2 and dec.d_factor.size == 2
    # N is the group side (f = g = xor), D the lattice side (f = meet, g = join)
    assert dec.n_factor.op("f").table == dec.n_factor.op("g").table == (0, 1, 1, 0)
    assert dec.d_factor.op("f").table == (0, 0, 0, 1)
    assert dec.d_factor.op("g").table == (0, 1, 1, 1)


def test_decompose_reassembly_bit_exact(z2xl2):
    dec = decompose_nd(z2xl2)
    prod = direct_product(dec.n_factor, dec.d_factor)
    # iso: a -> (a/rho4, a/rho2) -> index i*|D| + j must transport the tables
    mapping = [i * dec.d_factor.size + j for (i, j) in dec.iso]
    assert sorted(mapping) == list(range(z2xl2.size))  # bijection
    for op_a, op_p in zip(z2xl2.ops, prod.ops):
        import itertools

        for args in itertools.product(range(z2xl2.size), repeat=op_a.arity):
            mapped = tuple(mapping[x] for x in args)
            assert mapping[op_a.apply(args, z2xl2.size)] == op_p.apply(mapped, prod.size)


def test_decompose_z6_trivial_d(z6):
    dec = decompose_nd(z6)
    assert dec.n_factor.size == 6 and dec.d_factor.size == 1


def test_decompose_2lattice_trivial_n(lat2):
    dec = decompose_nd(lat2)
    assert dec.n_factor.size == 1 and dec.d_factor.size == 2


def test_decompose_none_for_type3(bool2):
    assert decompose_nd(bool2) is None


# ---------------------------------------------------------------------------
# DL-likeness


def test_dl_like_2lattice(lat2):
    verdict, witnesses = is_dl_like(lat2)
    assert verdict is Tri.YES
    assert witnesses == [Partition.zero(2)]


def test_dl_like_majority_three_witnesses(majority):
    verdict, witnesses = is_dl_like(majority)
    assert verdict is Tri.YES
    assert len(witnesses) == 3
    meet = Partition.one(4)
    for w in witnesses:
        assert w.num_classes == 2
        meet = meet.meet(w)
    assert meet.is_zero()


def test_dl_like_z2_no(z2):
    verdict, _ = is_dl_like(z2)
    assert verdict is Tri.NO


def test_dl_like_trivial(trivial):
    verdict, _ = is_dl_like(trivial)
    assert verdict is Tri.YES


def test_majority_not_poly_equiv_to_a_lattice(majority, lat2):
    assert is_poly_equiv_to_some_lattice(lat2)
    assert not is_poly_equiv_to_some_lattice(majority)


# ---------------------------------------------------------------------------
# Classification


def test_classify_z6_all_polytime(z6):
    rep = classify(z6)
    assert all(v.kind == "PolyTime" for v in rep.verdicts.values())


def test_classify_s3(s3):
    rep = classify(s3)
    assert rep.verdicts["CSAT"].kind == "NPComplete-regime"
    assert rep.verdicts["CEQV"].kind == "CoNPComplete-regime"
    assert rep.verdicts["SCSAT"].kind == "NPComplete-regime"


def test_classify_2lattice(lat2):
    rep = classify(lat2)
    assert rep.verdicts["CSAT"].kind == "PolyTime"
    assert rep.verdicts["SCSAT"].kind == "NPComplete-regime"
    assert rep.verdicts["CEQV"].kind == "CoNPComplete-regime"


def test_classify_z4ring(z4ring):
    rep = classify(z4ring)
    assert rep.nilpotent and rep.supernilpotent is Tri.YES
    assert rep.verdicts["CSAT"].kind == "PolyTime"
    assert rep.verdicts["SCSAT"].kind == "NPComplete-regime"
    assert rep.verdicts["CEQV"].kind == "PolyTime"


def test_classify_non_cm_unknown(semi2):
    rep = classify(semi2)
    assert rep.cm is Tri.NO
    assert all(v.kind == "Unknown" for v in rep.verdicts.values())


def test_classify_deterministic_and_json_stable(z6):
    a = classify(z6).as_dict()
    b = classify(z6).as_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["schema"] == 1


@pytest.mark.parametrize("entry", zoo(), ids=lambda e: e.name)
def test_zoo_golden_fragments(entry):
    rep = classify(entry.algebra)
    want = entry.golden.get("verdicts", {})
    got = {k: v.kind for k, v in rep.verdicts.items()}
    for prob, kind in want.items():
        assert got[prob] == kind, f"{entry.name} {prob}: got {got[prob]}, want {kind}"
    flags = entry.golden.get("flags", {})
    data = rep.as_dict()["flags"]
    for key, val in flags.items():
        if key == "typeset":
            assert rep.typeset == val
        elif key == "poly_equiv_to_some_lattice":
            assert is_poly_equiv_to_some_lattice(entry.algebra) == val
        else:
            assert data[key] == val, f"{entry.name} flag {key}"
