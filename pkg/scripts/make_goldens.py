"""Regenerate tests/golden/ from the shipped corpus.

Run only after the oracle acceptance criteria (AC1-AC5) pass:

    pytest tests/test_acceptance.py -k "not ac9" && python scripts/make_goldens.py
"""

import io
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from rsqtsm.cli import main  # noqa: E402
from test_acceptance import golden_commands  # noqa: E402

GOLDEN = ROOT / "tests" / "golden"


def run() -> int:
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in golden_commands():
        out, err = io.StringIO(), io.StringIO()
        code = main(argv, out=out, err=err)
        if code != 0:
            sys.stderr.write(f"{name}: exit {code}\n{err.getvalue()}")
            return 1
        (GOLDEN / name).write_text(out.getvalue())
        print(f"wrote {name}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
