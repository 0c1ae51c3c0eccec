#!/usr/bin/env python3
"""Run the acceptance gate and print only the per-criterion lines."""

import argparse
import subprocess
import sys
from pathlib import Path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-k", default=None, help="pytest -k expression, e.g. 'not 8'")
    args = ap.parse_args()
    test = Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"
    cmd = [sys.executable, "-m", "pytest", str(test), "-q", "-s", "-p", "no:cacheprovider"]
    if args.k:
        cmd += ["-k", args.k]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith("criterion ")]
    print("\n".join(lines))
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
