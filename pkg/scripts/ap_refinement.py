#!/usr/bin/env python3
"""Refinement sweep of the A_1 estimate for the scalar weight |x|^{-1/2}.

The estimates are certified lower bounds, so they increase monotonically in
the per-axis quadrature count q and approach the closed-form value 2.
"""

import argparse

from mwlp import CubeFamily, WeightSpec, ap_constant


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=-0.5)
    parser.add_argument("--p", type=float, default=1.0)
    parser.add_argument("--qs", type=int, nargs="+", default=[64, 128, 256, 512])
    args = parser.parse_args()

    spec = WeightSpec.scalar_power(1, 1, args.alpha)
    print(f"weight |x|^{args.alpha}, p = {args.p}")
    for q in args.qs:
        est = ap_constant(spec, args.p, CubeFamily(1, q=q))
        print(
            f"  q = {q:4d}  estimate = {est.value:.6f}  "
            f"argmax cube center = {est.argmax_center[0]:+.4f}  scale = {est.argmax_scale:g}"
        )


if __name__ == "__main__":
    main()
