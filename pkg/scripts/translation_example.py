"""Worked translation example: n=2, m=1, H = translations of C^2.

Verifies the frame (D x1), rewrites generators along it and certifies the
jet rank of the first two rewritten invariants.
"""

import argparse

from diffinv import Context, GaugeFrame, delta_rewrite, invariance_check, jet_jacobian_rank
from diffinv.actions import DeltaOperators, translations


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=3, help="number of delta-derivatives to take")
    args = ap.parse_args()

    ctx = Context(m=1, n=2)
    grp = translations(2)
    frame = GaugeFrame.build(ctx, [[ctx.x(1, (1,))]], grp)
    ops = DeltaOperators(frame.phi)

    f = delta_rewrite(ctx.x(2, (1,)), frame)
    chain = [f]
    for _ in range(args.depth - 1):
        chain.append(ops.apply(chain[-1], 1))
    for k, g in enumerate(chain):
        ok = invariance_check(ctx, g, grp, gauge=True)
        print("delta^%d f = %s   joint-invariant: %s" % (k, g, ok.passed))
    for k in range(1, len(chain) + 1):
        r = jet_jacobian_rank(ctx, chain[:k])
        print("jet rank of first %d: %d" % (k, r))


if __name__ == "__main__":
    main()
