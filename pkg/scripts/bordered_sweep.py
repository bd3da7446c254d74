"""Sweep bordered-determinant invariants over all alpha sets with |alpha| <= top."""

import argparse
import itertools
import time

from diffinv import Context, bordered_invariant_coeffs, invariance_check
from diffinv.actions import general_affine
from diffinv.invariants import bordered_equation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--top", type=int, default=3)
    args = ap.parse_args()

    ctx = Context(m=args.m, n=args.n)
    gl = general_affine(args.n)
    idx = [a for a in itertools.product(range(args.top + 1), repeat=args.m) if 0 < sum(a) <= args.top]
    t0 = time.perf_counter()
    cases = bad = 0
    for alphas in itertools.combinations(idx, args.n):
        for alpha in idx:
            if alpha in alphas:
                continue
            coeffs = bordered_invariant_coeffs(ctx, alphas, alpha)
            inv = all(invariance_check(ctx, c, gl) for c in coeffs)
            sol = all(bordered_equation(ctx, alphas, alpha, ctx.x(j), coeffs).is_zero() for j in range(1, args.n + 1))
            cases += 1
            bad += not (inv and sol)
    print("n=%d m=%d |alpha|<=%d: %d cases, %d failures, %.2fs" % (args.n, args.m, args.top, cases, bad,
                                                                   time.perf_counter() - t0))


if __name__ == "__main__":
    main()
