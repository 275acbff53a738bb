"""Command line interface: validate sites, compute groups, run axiom suites, extract parts.

Sites are given as a path to a JSON file or as ``bundled:<name>`` for the
fixtures shipped with the package. Reports are canonical JSON (``--json``:
sorted keys, no insignificant whitespace) or a plain text rendering.

Exit codes: 0 success, 1 semantic failure, 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bivariant import (
    THEORIES,
    NonSmoothError,
    OperationUndefined,
    TheoryHandle,
    axiom_suite,
    contravariant_part,
    covariant_part,
)
from .site import BUNDLED, SiteError, SiteParseError, bundled_site, load_site_file, validate_site

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_FAIL):
        super().__init__(message)
        self.code = code


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def parse_grades(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grade window must look like lo..hi, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty grade window {text!r}")
    return lo, hi


def open_site(ref: str):
    if ref.startswith("bundled:"):
        name = ref.split(":", 1)[1]
        if name not in BUNDLED:
            raise CliError(f"no bundled site {name!r}; choose from {', '.join(BUNDLED)}", EXIT_IO)
        return bundled_site(name)
    path = Path(ref)
    if not path.is_file():
        raise CliError(f"cannot read site file {ref}", EXIT_IO)
    try:
        return load_site_file(path)
    except SiteParseError as exc:
        raise CliError(f"parse error: {exc}", EXIT_IO) from None
    except OSError as exc:
        raise CliError(f"cannot read site file {ref}: {exc.strerror}", EXIT_IO) from None


def site_info(S) -> dict:
    return {"name": S.name, "digest": S.digest}


def handle(S, args) -> TheoryHandle:
    return TheoryHandle(S, args.theory, args.truncate_degree, args.bundle_bound, args.grades)


def group_table(T: TheoryHandle, f: str) -> dict:
    G = T.group(f)
    return {str(g): {"rank": r, "torsion": t, "generators": [repr(x) for x in G.labels(g)]}
            for g in G.grades for r, t in [G.invariants(g)]}


# -- commands ------------------------------------------------------------------------


def cmd_validate(S, args) -> tuple[dict, int]:
    vs = validate_site(S)
    report = {"command": "validate", "site": site_info(S), "ok": not vs,
              "violations": [v.as_dict() for v in vs]}
    return report, EXIT_OK if not vs else EXIT_FAIL


def cmd_group(S, args) -> tuple[dict, int]:
    T = handle(S, args)
    arrows = [args.arrow] if args.arrow else sorted(S.morphisms)
    if args.arrow and args.arrow not in S.morphisms:
        raise CliError(f"unknown arrow {args.arrow!r}")
    out, status = {}, EXIT_OK
    for f in arrows:
        entry = {"src": S.src(f), "dst": S.dst(f)}
        try:
            entry["grades"] = group_table(T, f)
            if T.kind in ("OB", "OB1"):
                entry["bundle_bound"] = T.bundle_bound(f)
            if T._quotient is not None:
                entry.update(T._quotient.summary(f))
        except NonSmoothError as exc:
            if args.arrow:
                raise CliError(str(exc)) from None
            entry["error"] = str(exc)
        out[f] = entry
    report = {"command": "group", "site": site_info(S), "parameters": T.parameters(), "arrows": out}
    if T.kind in ("OB", "OB1", "OB2"):
        report["fragment"] = "groups are truncated fragments at the stated bounds"
    if T.kind in ("OB1", "OB2"):
        R = (T._quotient if T.kind == "OB1" else T._quotient.inner._quotient).ring
        report["lazard"] = {"N": R.N, "ranks": R.free_ranks(),
                            "grading": "total grade = Lazard degree + cycle grade"}
    return report, status


def cmd_axioms(S, args) -> tuple[dict, int]:
    kind = args.theory
    if kind in ("OB2", "OB4"):
        raise CliError(f"the operations of {kind} are not defined; no axiom suite to run")
    raw = {"OB1": "OB", "OB3": "M"}.get(kind, kind)
    B = 1 if args.bundle_bound is None else args.bundle_bound
    suite = axiom_suite(S, raw, B)
    report = {"command": "axioms", "site": site_info(S), "theory": kind, "suite": suite.as_dict()}
    ok = suite.ok
    if kind in ("OB1", "OB3"):
        from .quotients import descent_check
        d = descent_check(handle(S, args))
        report["descent"] = d.as_dict()
        ok = ok and d.ok
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_extract(S, args) -> tuple[dict, int]:
    T = handle(S, args)
    if args.object and args.object not in S.objects:
        raise CliError(f"unknown object {args.object!r}")
    objects = [args.object] if args.object else sorted(S.objects)
    part = covariant_part if args.variance == "co" else contravariant_part
    out = {}
    for X in objects:
        try:
            e = part(T, X).as_dict()
            out[X] = {k: v for k, v in e.items() if k not in ("theory", "object", "variance")}
        except NonSmoothError as exc:
            if args.object:
                raise CliError(str(exc)) from None
            out[X] = {"error": str(exc)}
    report = {"command": "extract", "site": site_info(S), "parameters": T.parameters(),
              "variance": args.variance, "objects": out}
    return report, EXIT_OK


COMMANDS = {"validate": cmd_validate, "group": cmd_group, "axioms": cmd_axioms, "extract": cmd_extract}


# -- text rendering ----------------------------------------------------------------


def _groups_text(grades: dict, indent: str) -> list[str]:
    lines = []
    for g, d in grades.items():
        tors = "".join(f" + Z/{t}" for t in d["torsion"])
        lines.append(f"{indent}grade {g}: Z^{d['rank']}{tors}  [{', '.join(d['generators'])}]")
    return lines


def render_text(report: dict) -> str:
    site = report["site"]
    lines = [f"{report['command']} {site['name']} (sha256 {site['digest'][:12]})"]
    cmd = report["command"]
    if cmd == "validate":
        lines.append("valid" if report["ok"] else f"{len(report['violations'])} violation(s)")
        lines += [f"  {v['code']}: {v['message']}" for v in report["violations"]]
    elif cmd == "group":
        lines.append("parameters: " + canonical_json(report["parameters"]))
        if "lazard" in report:
            lines.append(f"L_N ranks: {report['lazard']['ranks']} ({report['lazard']['grading']})")
        for f, e in report["arrows"].items():
            lines.append(f"{f}: {e['src']} -> {e['dst']}")
            if "error" in e:
                lines.append(f"  error: {e['error']}")
                continue
            lines += _groups_text(e["grades"], "  ")
            if "relations" in e:
                lines.append("  relations: " + canonical_json(e["relations"]))
    elif cmd == "axioms":
        s = report["suite"]
        lines.append(f"theory {report['theory']} (suite on {s['kind']}, bundle bound {s['bundle_bound']})")
        for name, t in s["axioms"].items():
            lines.append(f"  {name}: " + ", ".join(f"{k} {v}" for k, v in t.items()))
        for fail in s["failures"]:
            lines.append(f"  FAIL {fail['axiom']}: {fail['witness']}")
        lines.append("  totals: " + canonical_json(s["totals"]))
        if "descent" in report:
            d = report["descent"]
            lines.append("descent: checked " + canonical_json(d["checked"]) + ", passed "
                         + canonical_json(d["passed"]) + f", violations {len(d['violations'])}")
    elif cmd == "extract":
        lines.append(f"variance {report['variance']}, parameters " + canonical_json(report["parameters"]))
        for X, e in report["objects"].items():
            if "error" in e:
                lines.append(f"{X}: error: {e['error']}")
                continue
            lines.append(f"{X} via {e['arrow']}")
            lines += _groups_text(e["groups"], "  ")
            for row in e.get("table", []):
                rhs = row.get("product", row.get("skipped", row.get("undefined")))
                rhs = canonical_json(rhs) if isinstance(rhs, dict) else rhs
                lines.append(f"  {row['a']} . {row['b']} = {rhs}")
            if e.get("note"):
                lines.append(f"  note: {e['note']}")
    return "\n".join(lines)


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("site", help="site JSON file, or bundled:<name>")
    common.add_argument("--json", action="store_true", help="emit canonical JSON")
    common.add_argument("--theory", choices=THEORIES, default="M")
    common.add_argument("--truncate-degree", type=int, default=3, metavar="N")
    common.add_argument("--bundle-bound", type=int, default=None, metavar="B")
    common.add_argument("--grades", type=parse_grades, default=None, metavar="LO..HI")

    p = argparse.ArgumentParser(prog="bivcob", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a site against the site laws")
    g = sub.add_parser("group", parents=[common], help="invariants of the groups over arrows")
    g.add_argument("--arrow", default=None)
    sub.add_parser("axioms", parents=[common], help="run the bivariant axiom suite")
    e = sub.add_parser("extract", parents=[common], help="covariant or contravariant part at objects")
    e.add_argument("--object", default=None)
    e.add_argument("--variance", choices=("co", "contra"), default="co")
    return p


def run(argv: list[str] | None = None) -> tuple[str, int]:
    """Execute a command; return the rendered report (or error message) and the exit code."""
    args = build_parser().parse_args(argv)
    try:
        if args.truncate_degree < 0 or (args.bundle_bound is not None and args.bundle_bound < 0):
            raise CliError("truncation parameters must be >= 0")
        S = open_site(args.site)
        report, code = COMMANDS[args.command](S, args)
    except CliError as exc:
        return f"error: {exc}", exc.code
    except (SiteError, OperationUndefined, ValueError) as exc:
        return f"error: {exc}", EXIT_FAIL
    return (canonical_json(report) if args.json else render_text(report)), code


def main(argv: list[str] | None = None) -> int:
    text, code = run(argv)
    print(text, file=sys.stdout if code != EXIT_IO and not text.startswith("error:") else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
