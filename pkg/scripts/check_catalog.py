"""Run the proposition checks on a catalog and print one line per entry.

    python scripts/check_catalog.py [catalog.json] [--threads N]
"""

import argparse
import sys

from hornred.propositions import default_catalog_path, load_catalog, run_catalog


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("catalog", nargs="?", default=None)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args(argv)
    path = args.catalog or default_catalog_path()
    report = run_catalog(load_catalog(path), threads=args.threads)
    for rec in report["entries"]:
        status = "ok  " if rec["passed"] else "FAIL"
        detail = rec.get("error") or f"computed {rec.get('computed')} expected {rec['expected_masters']}"
        print(f"{status} {rec['name']:<34} {detail}")
    print(f"{len(report['entries']) - len(report['failing'])}/{len(report['entries'])} entries pass")
    return 0 if report["passed"] else 2


if __name__ == "__main__":
    sys.exit(main())
