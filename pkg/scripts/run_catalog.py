"""Run built-in catalog experiments and write each into its own folder.

    python3 scripts/run_catalog.py --out results            # everything
    python3 scripts/run_catalog.py fig6a fig6b --n 20000    # a subset, more samples
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from coxnet.cli import CATALOG, catalog_config, run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help="catalog entries (default: all)")
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--n", type=int, help="override the Monte Carlo sample size")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)
    names = args.names or list(CATALOG)
    for name in names:
        cfg = catalog_config(name)
        mc = cfg.mc
        if args.n is not None:
            mc = replace(mc, n=args.n)
        if args.seed is not None:
            mc = replace(mc, seed=args.seed)
        t0 = time.monotonic()
        out = run(replace(cfg, mc=mc), args.out / name, jobs=args.jobs)
        print(f"== {name} ({time.monotonic() - t0:.0f}s)")
        for line in out.summary:
            print("  " + line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
