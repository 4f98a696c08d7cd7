#!/usr/bin/env python3
"""Measure serialized key sizes across vector lengths and parameter sets.

Key bytes grow affinely in h (the matching-family vector length):
header + 2*(h+1)*tau*width.  This prints the sweep for a few parameter
tuples and reports the affine fit residual, which is zero by construction.

    python scripts/keysize_sweep.py
    python scripts/keysize_sweep.py --h-values 2,8,32,128
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from itdpf.dpf import coeff_width  # noqa: E402
from itdpf.interpolation import build_scheme  # noqa: E402
from itdpf.oracles import key_size_sweep  # noqa: E402
from itdpf.params import build_params  # noqa: E402

TUPLES = [((7, 73), 2), ((2, 3), 5), ((2, 3), 7)]


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h-values", default="2,4,8,16,32,64")
    args = ap.parse_args(argv)
    h_values = [int(s) for s in args.h_values.split(",")]

    for primes, p in TUPLES:
        params = build_params(primes, p)
        scheme = build_scheme(params)
        slope = 2 * params.tau * coeff_width(p)
        print(f"m={params.m} p={p} tau={params.tau} n={scheme.n} "
              f"(slope {slope} bytes per unit h)")
        residual = 0
        for audit in key_size_sweep(params, scheme, h_values):
            predicted = audit.header + slope * (audit.h + 1)
            residual += abs(audit.measured - predicted)
            print(f"  h={audit.h:>4}  {audit.measured:>6} bytes  "
                  f"(formula {audit.formula})")
        print(f"  affine fit residual: {residual}")
        if residual:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(run())
