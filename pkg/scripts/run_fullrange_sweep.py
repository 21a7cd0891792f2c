#!/usr/bin/env python3
"""Run the bundled full-range sweep and print a short summary.

Certifies all three matrix families on the r grid 0.02..1.0 and runs the
seeded decay studies from the spec.  Writes the full JSON result next to
the output path (default out/fullrange_result.json).
"""

import argparse
import json
import pathlib
import sys

from moogvcf.cli import main as cli_main

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--spec", default=str(ROOT / "specs" / "fullrange.json"))
    ap.add_argument("--out", default=str(ROOT / "out" / "fullrange_result.json"))
    args = ap.parse_args()

    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    code = cli_main(["sweep", "--spec", args.spec, "--out", args.out])
    if code != 0:
        print(f"sweep exited with {code}", file=sys.stderr)
        return code

    data = json.loads(pathlib.Path(args.out).read_text())
    n_nd = sum(1 for rep in data["reports"] if rep["verdict"] == "NegativeDefinite")
    worst = max((d["max_v_increase"] for d in data["decay"]
                 if d["max_v_increase"] is not None), default=float("nan"))
    print(f"reports: {len(data['reports'])} ({n_nd} negative definite)")
    print(f"thresholds: {data['thresholds']}")
    print(f"decay trajectories: {len(data['decay'])}, worst per-step V increase: {worst:.3e}")
    print(f"all_pass: {data['all_pass']}  ->  {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
