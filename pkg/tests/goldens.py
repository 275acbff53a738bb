"""The pinned CLI report matrix: every command on every bundled fixture.

Run ``python3 tests/goldens.py`` to rewrite the files after an intended
change of report content.
"""

from pathlib import Path

from bivcob.bivariant import THEORIES
from bivcob.cli import run
from bivcob.site import BUNDLED

GOLDEN = Path(__file__).parent / "golden"
AXIOM_THEORIES = ("M", "Mprime", "OB", "OB1", "OB3")


def cases():
    out = []
    for site in BUNDLED:
        out.append((f"validate-{site}", ["validate", f"bundled:{site}"]))
        for T in THEORIES:
            out.append((f"group-{site}-{T}", ["group", f"bundled:{site}", "--theory", T]))
            for v in ("co", "contra"):
                out.append((f"extract-{site}-{T}-{v}",
                            ["extract", f"bundled:{site}", "--theory", T, "--variance", v]))
        for T in AXIOM_THEORIES:
            out.append((f"axioms-{site}-{T}", ["axioms", f"bundled:{site}", "--theory", T]))
    return out


CASES = cases()


def render(argv):
    return run(argv + ["--json"])


def pinned(name):
    return (GOLDEN / f"{name}.json").read_text().rstrip("\n")


def regenerate():
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES:
        text, code = render(argv)
        if code != 0:
            raise SystemExit(f"{name}: exit {code}: {text}")
        (GOLDEN / f"{name}.json").write_text(text + "\n")
    print(f"wrote {len(CASES)} goldens to {GOLDEN}")


if __name__ == "__main__":
    regenerate()
