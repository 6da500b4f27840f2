"""Run the SSH case study and print (or save) the JSON report."""

import argparse
import json
from pathlib import Path

from hmmident.casestudy import run_casestudy


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--timing", action="store_true")
    args = ap.parse_args(argv)
    report = run_casestudy(timing=args.timing)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        args.out.write_text(text)
    for c in report["checks"]:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}")
    if args.timing:
        print(f"{report['seconds']}s")
    return 0 if report["all_passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
