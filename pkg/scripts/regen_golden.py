"""Regenerate CLI golden files under tests/golden from cases.json."""

import contextlib
import io
import json
import os
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from diffinv.cli import main  # noqa: E402

GOLDEN = ROOT / "tests" / "golden"


def run_case(case):
    """(exit code, stdout) for one case, run from the golden directory."""
    out = io.StringIO()
    old_stdin, old_cwd = sys.stdin, os.getcwd()
    sys.stdin = io.StringIO(case.get("stdin", ""))
    os.chdir(GOLDEN)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
            code = main(case["args"])
    finally:
        sys.stdin = old_stdin
        os.chdir(old_cwd)
    return code, out.getvalue()


def render(code, stdout):
    return "exit: %d\n%s" % (code, stdout)


if __name__ == "__main__":
    cases = json.loads((GOLDEN / "cases.json").read_text())
    for case in cases:
        code, stdout = run_case(case)
        (GOLDEN / (case["name"] + ".out")).write_text(render(code, stdout))
        print("%-32s exit %d" % (case["name"], code))
