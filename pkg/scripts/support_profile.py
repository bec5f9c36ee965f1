#!/usr/bin/env python3
"""Empirical probe of the bounded-support phenomenon: over random satisfiable
one-equation instances on supernilpotent fixtures, how large does the
smallest solution support get?

Usage: python scripts/support_profile.py [algebra] [batch] [seed]
"""

import random
import sys

from mvcirc.circuit import CsatInstance, random_circuit
from mvcirc.solvers import minimal_support_profile
from mvcirc.zoo import get


def main() -> int:
    name = sys.argv[1] if len(sys.argv) > 1 else "Z4"
    batch = int(sys.argv[2]) if len(sys.argv) > 2 else 500
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    alg = get(name)
    rng = random.Random(seed)
    histogram: dict[int, int] = {}
    unsat = 0
    for _ in range(batch):
        n_inputs = rng.randint(2, 3)
        inst = CsatInstance(random_circuit(alg, rng, n_inputs, rng.randint(4, 10), 2))
        hist = minimal_support_profile(alg, inst)
        if hist is None:
            unsat += 1
            continue
        s = min(hist)
        histogram[s] = histogram.get(s, 0) + 1
    print(f"algebra {name}, {batch} random instances (seed {seed}), {unsat} unsatisfiable")
    print("minimal support of satisfiable instances:")
    for s in sorted(histogram):
        bar = "#" * (60 * histogram[s] // max(histogram.values()))
        print(f"  {s}: {histogram[s]:5d} {bar}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
