#!/usr/bin/env python3
"""Timing and agreement comparison of the dispatcher's fast paths against
brute force on random instances over a chosen fixture.

Usage: python scripts/solver_shootout.py [algebra] [batch] [seed]
"""

import random
import sys
import time

from mvcirc.circuit import CsatInstance, random_circuit
from mvcirc.solvers import dispatch, solve_bruteforce
from mvcirc.structure import classify
from mvcirc.zoo import get


def main() -> int:
    name = sys.argv[1] if len(sys.argv) > 1 else "Z6"
    batch = int(sys.argv[2]) if len(sys.argv) > 2 else 300
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    alg = get(name)
    report = classify(alg)
    print(f"algebra {name}: CSAT verdict {report.verdicts['CSAT'].kind}")
    rng = random.Random(seed)
    instances = [
        CsatInstance(random_circuit(alg, rng, rng.randint(2, 4), rng.randint(5, 12), 2))
        for _ in range(batch)
    ]
    t0 = time.time()
    fast = [dispatch(alg, inst) for inst in instances]
    t_fast = time.time() - t0
    t0 = time.time()
    slow = [solve_bruteforce(alg, inst) for inst in instances]
    t_slow = time.time() - t0
    agree = sum(1 for f, s in zip(fast, slow) if f.answer == s.answer)
    solvers = sorted({f.solver_used for f in fast})
    print(f"{batch} instances: agreement {agree}/{batch}")
    print(f"dispatch {t_fast:.2f}s (paths: {', '.join(solvers)}) vs brute {t_slow:.2f}s")
    return 0 if agree == batch else 1


if __name__ == "__main__":
    sys.exit(main())
