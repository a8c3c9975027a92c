import argparse

from app.services.selftest_service import run_selftest


def register(subparsers) -> None:
    parser = subparsers.add_parser("selftest", help="run the fast invariant suite")
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    report = run_selftest()
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        line = f"{status}  {check.name:<20} observed={check.observed:.3e}  tolerance={check.tolerance:.1e}"
        if check.detail:
            line += f"  ({check.detail})"
        print(line)
    print(f"{len(report.checks) - len(report.failed)}/{len(report.checks)} checks passed in {report.seconds:.1f} s")
    if not report.passed:
        print("failed: " + ", ".join(c.name for c in report.failed))
        return 1
    return 0
