#!/usr/bin/env python3
"""Spin up a full server fleet and privately retrieve every database entry.

Builds all artifacts in a working directory, launches one OS process per
key index, then runs one private retrieval per database position and
checks the answer against the plaintext database.

    python scripts/run_pir_demo.py --workdir /tmp/pirdemo
    python scripts/run_pir_demo.py --primes 2,3 --p 5 --h 8
"""

import argparse
import json
import random
import subprocess
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from itdpf.cli import main as cli_main  # noqa: E402
from itdpf.client import run_query  # noqa: E402
from itdpf.interpolation import build_scheme  # noqa: E402
from itdpf.matching import trivial_family  # noqa: E402
from itdpf.params import build_params  # noqa: E402


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="7,73")
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--h", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workdir", default="demo_artifacts")
    args = ap.parse_args(argv)

    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    paths = {name: str(workdir / f"{name}.json")
             for name in ("params", "scheme", "family")}

    for rc in (
        cli_main(["params", "--primes", args.primes, "--p", str(args.p),
                  "--out", paths["params"]]),
        cli_main(["scheme", "--params", paths["params"], "--out", paths["scheme"]]),
        cli_main(["family", "--params", paths["params"], "--h", str(args.h),
                  "--out", paths["family"]]),
    ):
        if rc != 0:
            return rc

    primes = [int(s) for s in args.primes.split(",")]
    params = build_params(primes, args.p)
    scheme = build_scheme(params)
    family = trivial_family(params.M, args.h)

    rng = random.Random(args.seed)
    db = [rng.randrange(args.p) for _ in range(args.h)]
    db_path = workdir / "db.txt"
    db_path.write_text("\n".join(str(v) for v in db) + "\n")
    print(f"database ({args.h} entries mod {args.p}): {db}")

    procs = []
    addresses = []
    start = time.monotonic()
    try:
        for i in range(2 * scheme.n):
            proc = subprocess.Popen(
                [sys.executable, "-m", "itdpf", "serve", "--index", str(i),
                 "--port", "0", "--params", paths["params"],
                 "--scheme", paths["scheme"], "--family", paths["family"],
                 "--db", str(db_path)],
                stdout=subprocess.PIPE, text=True)
            ready = json.loads(proc.stdout.readline())
            addresses.append(("127.0.0.1", ready["port"]))
            procs.append(proc)
        print(f"{len(procs)} servers up on ports "
              f"{[port for _, port in addresses]}")

        mistakes = 0
        for alpha in range(1, args.h + 1):
            result = run_query(addresses, params, family, scheme,
                               alpha=alpha, beta=1, seed=alpha, pir=True)
            mark = "ok" if result.value == db[alpha - 1] else "MISMATCH"
            if mark != "ok":
                mistakes += 1
            print(f"  retrieve db[{alpha}] -> {result.value} "
                  f"(expected {db[alpha - 1]}) {mark}")
        elapsed = time.monotonic() - start
        print(f"{args.h} private retrievals over {2 * scheme.n} servers in "
              f"{elapsed:.1f}s, {mistakes} mismatches")
        return 1 if mistakes else 0
    finally:
        for proc in procs:
            proc.terminate()


if __name__ == "__main__":
    sys.exit(run())
