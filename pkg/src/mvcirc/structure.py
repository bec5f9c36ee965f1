"""Radical decomposition, DL-likeness, and the tractability classification.

The per-problem verdicts are a pure function of structural flags:

  SCSAT: affine -> PolyTime, else NP-complete regime.
  MCSAT: decomposes as (affine x DL-like) -> PolyTime, else NP regime.
  CSAT:  decomposes as (supernilpotent x DL-like) -> PolyTime;
         no (nilpotent x DL-like) decomposition -> NP regime; else open gap.
  CEQV:  supernilpotent -> PolyTime; not nilpotent -> coNP regime; else open gap.

"Regime" verdicts assert membership in a hardness class, not a certificate.
They are only meaningful when the algebra generates a congruence modular
variety: with that refuted the verdicts degrade to Unknown, and with the
(cap-bounded) check undecided they carry a CM-assumed caveat.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .algebra import (
    DEFAULT_CAP,
    FiniteAlgebra,
    direct_product,
    find_directed_gumm_terms,
    find_malcev_term,
    is_poly_equiv_to_2lattice,
    kary_poly_clone,
    quotient,
)
from .commutator import (
    is_abelian,
    is_affine,
    is_nilpotent,
    is_solvable,
    is_supernilpotent,
    nilpotency_class,
)
from .congruence import CongruenceLattice, congruence_lattice, factor_pairs
from .errors import Tri, UntypedLattice
from .partition import Partition
from .tct import TypedLattice, typed_congruence_lattice, typeset


def radical(alg: FiniteAlgebra, typed: TypedLattice, i: int) -> Partition:
    """Largest congruence rho with every cover pair inside [0, rho] labeled i."""
    if i not in (2, 4):
        raise ValueError("radical index must be 2 or 4")
    lat = typed.lattice
    candidates = []
    for rho in lat.congruences:
        ok = True
        for (a, b), label in typed.labels.items():
            if lat.congruences[b].leq(rho):
                if label is None:
                    raise UntypedLattice(f"cover below {rho} has unknown label")
                if label != i:
                    ok = False
                    break
        if ok:
            candidates.append(rho)
    result = Partition.zero(alg.size)
    for c in candidates:
        result = result.join(c)
    # re-scan: the join of qualifying congruences must itself qualify
    for (a, b), label in typed.labels.items():
        if lat.congruences[b].leq(result) and label != i:
            raise UntypedLattice(f"interval [0,{result}] is not pure type {i}")
    return result


@dataclass
class Decomposition:
    n_factor: FiniteAlgebra
    d_factor: FiniteAlgebra
    rho2: Partition
    rho4: Partition
    iso: list[tuple[int, int]]   # a -> (a/rho4, a/rho2)


def decompose_nd(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> Optional[Decomposition]:
    """A = N x D along the type radicals, when the typeset is inside {2,4},
    rho2 ^ rho4 = 0, rho2 v rho4 = 1, and the pair permutes."""
    typed = typed_congruence_lattice(alg, cap)
    if not typed.fully_typed:
        raise UntypedLattice(f"Con({alg.name}) has unlabeled covers")
    if not typed.typeset() <= {2, 4}:
        return None
    rho2 = radical(alg, typed, 2)
    rho4 = radical(alg, typed, 4)
    if not rho2.meet(rho4).is_zero() or not rho2.join(rho4).is_one():
        return None
    from .congruence import permute

    if not permute(rho2, rho4):
        return None
    n_factor = quotient(alg, rho4, check=False).rename(f"{alg.name}.N")
    d_factor = quotient(alg, rho2, check=False).rename(f"{alg.name}.D")
    iso = [(rho4.class_of(a), rho2.class_of(a)) for a in range(alg.size)]
    # the map a -> (a/rho4, a/rho2) must be a bijection commuting with all ops
    if len(set(iso)) != alg.size:
        return None
    prod = direct_product(n_factor, d_factor)
    flat = [i * d_factor.size + j for (i, j) in iso]
    for op_a, op_p in zip(alg.ops, prod.ops):
        for args in itertools.product(range(alg.size), repeat=op_a.arity):
            mapped = tuple(flat[x] for x in args)
            if flat[op_a.apply(args, alg.size)] != op_p.apply(mapped, prod.size):
                return None
    return Decomposition(n_factor, d_factor, rho2, rho4, iso)


def is_dl_like(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> tuple[Tri, list[Partition]]:
    """Subdirect product of 2-element lattice-like algebras: the meet of all
    congruences with a 2-element lattice-like quotient must be the diagonal.
    The witness is the list of those congruences."""
    lat = congruence_lattice(alg)
    witnesses = []
    for theta in lat.congruences:
        if theta.num_classes != 2:
            continue
        q = quotient(alg, theta, check=False)
        if is_poly_equiv_to_2lattice(q, cap):
            witnesses.append(theta)
    meet = Partition.one(alg.size)
    for w in witnesses:
        meet = meet.meet(w)
    return (Tri.YES if meet.is_zero() else Tri.NO), witnesses


def is_poly_equiv_to_some_lattice(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> bool:
    """Whether some pair of binary polynomials turns the whole universe into a
    lattice with every unary polynomial monotone for its order."""
    clone2 = kary_poly_clone(alg, 2, cap)
    clone1 = kary_poly_clone(alg, 1, cap)
    n = alg.size

    def at(tab, x, y):
        return tab[x * n + y]

    meets = []
    for tab in clone2.tables:
        if all(at(tab, x, x) == x for x in range(n)) and \
           all(at(tab, x, y) == at(tab, y, x) for x in range(n) for y in range(n)) and \
           all(at(tab, at(tab, x, y), z) == at(tab, x, at(tab, y, z))
               for x in range(n) for y in range(n) for z in range(n)):
            meets.append(tab)
    for meet in meets:
        # induced order: x <= y iff meet(x,y) = x
        leq = [[at(meet, x, y) == x for y in range(n)] for x in range(n)]
        for join in meets:
            if all(
                (at(join, x, y) == y) == leq[x][y]
                for x in range(n) for y in range(n)
            ):
                # join is the lub for the same order; check unary monotonicity
                mono = all(
                    not leq[x][y] or leq[t[x]][t[y]]
                    for t in clone1.tables
                    for x in range(n)
                    for y in range(n)
                )
                if mono:
                    return True
    return False


# ---------------------------------------------------------------------------
# Classification


@dataclass
class Verdict:
    kind: str      # PolyTime | NPComplete-regime | CoNPComplete-regime | OpenGap | Unknown
    reason: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "reason": self.reason}


@dataclass
class ClassificationReport:
    algebra: str
    size: int
    cm: Tri
    abelian: bool
    solvable: bool
    nilpotent: bool
    nilpotency_class: Optional[int]
    supernilpotent: Tri
    affine: Tri
    dl_like: Tri
    typeset: Optional[list]
    decomposition: Optional[dict]
    verdicts: dict[str, Verdict]
    caveats: list[str] = field(default_factory=list)
    dl_witnesses: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "schema": 1,
            "algebra": self.algebra,
            "size": self.size,
            "flags": {
                "cm": self.cm.value,
                "abelian": self.abelian,
                "solvable": self.solvable,
                "nilpotent": self.nilpotent,
                "nilpotency_class": self.nilpotency_class,
                "supernilpotent": self.supernilpotent.value,
                "affine": self.affine.value,
                "dl_like": self.dl_like.value,
            },
            "typeset": self.typeset,
            "decomposition": self.decomposition,
            "verdicts": {k: v.as_dict() for k, v in self.verdicts.items()},
            "witnesses": {"dl_like": self.dl_witnesses},
            "caveats": self.caveats,
        }


def _tri_and(a: Tri, b: Tri) -> Tri:
    if a is Tri.NO or b is Tri.NO:
        return Tri.NO
    if a is Tri.UNKNOWN or b is Tri.UNKNOWN:
        return Tri.UNKNOWN
    return Tri.YES


def _exists_decomposition(alg: FiniteAlgebra, lat: CongruenceLattice,
                          left_flag, cap: int) -> Tri:
    """Whether some factor-congruence pair splits alg as N x D with
    left_flag(N) and D DL-like.  Trivial pairs (0,1)/(1,0) participate."""
    best = Tri.NO
    for fp in factor_pairs(alg, lat):
        n_fac = quotient(alg, fp.alpha1, check=False)
        d_fac = quotient(alg, fp.alpha2, check=False)
        verdict = _tri_and(left_flag(n_fac), is_dl_like(d_fac, cap)[0])
        if verdict is Tri.YES:
            return Tri.YES
        if verdict is Tri.UNKNOWN:
            best = Tri.UNKNOWN
    return best


_classify_cache: dict[tuple, "ClassificationReport"] = {}


def _alg_key(alg: FiniteAlgebra) -> tuple:
    return (alg.name, alg.size, alg.signature(), tuple(op.table for op in alg.ops))


def classify(alg: FiniteAlgebra, cap: int = DEFAULT_CAP) -> ClassificationReport:
    key = _alg_key(alg)
    cached = _classify_cache.get(key)
    if cached is not None:
        return cached

    gumm = find_directed_gumm_terms(alg, cap=cap)
    cm = gumm.status

    abelian = is_abelian(alg)
    solvable = is_solvable(alg)
    nilpotent = is_nilpotent(alg)
    nclass = nilpotency_class(alg)
    supernil, _fact = is_supernilpotent(alg)
    affine = is_affine(alg, cap)
    lat = congruence_lattice(alg)
    dl, dl_wit = is_dl_like(alg, cap)

    ts = typeset(alg, cap)
    typeset_list = sorted(x for x in ts if x is not None)
    if None in ts:
        typeset_list = typeset_list + ["unknown"]

    decomposition = None
    try:
        dec = decompose_nd(alg, cap)
    except UntypedLattice:
        dec = None
    if dec is not None:
        decomposition = {
            "N": {"name": dec.n_factor.name, "size": dec.n_factor.size},
            "D": {"name": dec.d_factor.name, "size": dec.d_factor.size},
            "rho2": str(dec.rho2),
            "rho4": str(dec.rho4),
            "iso": [list(pair) for pair in dec.iso],
        }

    def nilpotent_tri(a: FiniteAlgebra) -> Tri:
        return Tri.YES if is_nilpotent(a) else Tri.NO

    def supernil_tri(a: FiniteAlgebra) -> Tri:
        return is_supernilpotent(a)[0]

    def affine_tri(a: FiniteAlgebra) -> Tri:
        return is_affine(a, cap)

    sn_dl = _exists_decomposition(alg, lat, supernil_tri, cap)
    nil_dl = _exists_decomposition(alg, lat, nilpotent_tri, cap)
    aff_dl = _exists_decomposition(alg, lat, affine_tri, cap)

    caveats: list[str] = []
    if cm is Tri.NO:
        verdicts = {
            p: Verdict("Unknown", "not congruence modular; out of scope")
            for p in ("CSAT", "MCSAT", "SCSAT", "CEQV")
        }
        caveats.append("variety is not congruence modular; the decision table does not apply")
    else:
        if cm is Tri.UNKNOWN:
            caveats.append("CM-assumed: congruence modularity unverified (search capped)")
        verdicts = {}
        # SCSAT
        if affine is Tri.YES:
            verdicts["SCSAT"] = Verdict("PolyTime", "affine: Gaussian elimination over the module")
        elif affine is Tri.NO:
            verdicts["SCSAT"] = Verdict("NPComplete-regime", "not affine")
        else:
            verdicts["SCSAT"] = Verdict("Unknown", "affineness undecided")
        # MCSAT
        if aff_dl is Tri.YES:
            verdicts["MCSAT"] = Verdict("PolyTime", "decomposes as affine x DL-like")
        elif aff_dl is Tri.NO:
            verdicts["MCSAT"] = Verdict("NPComplete-regime", "no affine x DL-like decomposition")
        else:
            verdicts["MCSAT"] = Verdict("Unknown", "decomposition undecided")
        # CSAT
        if sn_dl is Tri.YES:
            verdicts["CSAT"] = Verdict("PolyTime", "decomposes as supernilpotent x DL-like")
        elif nil_dl is Tri.NO:
            verdicts["CSAT"] = Verdict("NPComplete-regime", "no nilpotent x DL-like decomposition")
        elif sn_dl is Tri.UNKNOWN or nil_dl is Tri.UNKNOWN:
            verdicts["CSAT"] = Verdict("Unknown", "decomposition undecided")
        else:
            verdicts["CSAT"] = Verdict("OpenGap", "nilpotent x DL-like but not supernilpotent x DL-like")
        # CEQV
        if supernil is Tri.YES:
            verdicts["CEQV"] = Verdict("PolyTime", "supernilpotent")
        elif not nilpotent:
            verdicts["CEQV"] = Verdict("CoNPComplete-regime", "not nilpotent")
        elif supernil is Tri.UNKNOWN:
            verdicts["CEQV"] = Verdict("Unknown", "supernilpotency undecided")
        else:
            verdicts["CEQV"] = Verdict("OpenGap", "nilpotent but not supernilpotent")

    report = ClassificationReport(
        algebra=alg.name,
        size=alg.size,
        cm=cm,
        abelian=abelian,
        solvable=solvable,
        nilpotent=nilpotent,
        nilpotency_class=nclass,
        supernilpotent=supernil,
        affine=affine,
        dl_like=dl,
        typeset=typeset_list,
        decomposition=decomposition,
        verdicts=verdicts,
        caveats=caveats,
        dl_witnesses=[str(w) for w in dl_wit],
    )
    _classify_cache[key] = report
    return report
