"""Command-line entry point: ``galinv <command> [options]``.

Exit codes: 0 success, 1 a checked result did not come out as expected,
2 bad configuration, 3 internal inconsistency.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from .calculus import (
    dispersion_scan, invariance_of_power, op_power, scan_to_csv, schrodinger_equivalent,
)
from .coupling import derivation_report
from .engine import (
    SchrodingerPhase, TransformContext, UnsupportedDimension, calibrate_boost,
    invariant_family, levy_leblond, mixed_term_report,
)
from .exact import parse_rational
from .galilei import GeneratorError, SpinorRep, symbolic_velocity
from .suite import InternalInconsistency, run_suite

SCHEMA = "galinv/1"
OUTPUT_ENV = "GALINV_OUTPUT_DIR"
COMMANDS = ("derive", "power", "planewave", "couple", "prop-suite")

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    ncomp: int = 4
    order: int = 1
    forbid_mixed: bool = False
    mass: Fraction = Fraction(1)
    output_dir: Optional[Path] = None
    format: str = "json"
    power: int = 2
    kmax: int = 2

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.ncomp not in (1, 2, 4):
            raise ConfigError(f"--ncomp must be 1, 2 or 4, got {self.ncomp}")
        if self.order < 1:
            raise ConfigError("--order must be at least 1")
        if self.mass <= 0:
            raise ConfigError("--mass must be a positive rational")
        if self.power < 1:
            raise ConfigError("--N must be at least 1")
        if self.kmax < 0:
            raise ConfigError("--kmax must be non-negative")
        if self.format not in ("json", "latex", "text"):
            raise ConfigError(f"unknown format {self.format!r}")


# ---------------------------------------------------------------------------
# commands; each returns (report dict, text lines, latex lines, ok flag, extra files)


def _derive(cfg: RunConfig):
    fam = invariant_family(cfg.ncomp, cfg.order, cfg.forbid_mixed, SchrodingerPhase(cfg.mass))
    report = fam.to_json()
    text = [f"ncomp: {cfg.ncomp}  order: {cfg.order}  forbid mixed: {cfg.forbid_mixed}",
            f"family dimension: {fam.dimension}",
            f"raw invariant dimension: {fam.raw_dimension}"]
    latex = [f"% family dimension: {fam.dimension}"]
    for k, op in enumerate(fam.basis, 1):
        text.append(f"basis element {k}:")
        text.extend("  " + line for line in op.pretty().splitlines())
        latex.append(_op_latex(op))
    return report, text, latex, True, {}


def _power(cfg: RunConfig):
    m = cfg.mass
    phase = SchrodingerPhase(m)
    L = levy_leblond(m)
    P = op_power(L, cfg.power)
    gens = calibrate_boost(4, phase)["generators"]
    boost = invariance_of_power(L, cfg.power, TransformContext.boost(
        gens, symbolic_velocity(), phase, "symbolic boost"))
    rotations = [invariance_of_power(L, cfg.power, TransformContext.rotation(
        SpinorRep.axis(k, 4), phase, f"rotation about axis {k}")) for k in (1, 2, 3)]
    mixed = mixed_term_report(P)
    factor = schrodinger_equivalent(P, m)
    report = {
        "N": cfg.power,
        "operator": P.to_json(),
        "mixed_terms": [list(i) for i in mixed],
        "invariance": [boost.to_json()] + [r.to_json() for r in rotations],
        "schrodinger_factor": None if factor is None else factor.to_json(),
    }
    text = [f"L^{cfg.power} has {len(P.terms)} derivative terms",
            f"mixed time-space terms: {len(mixed)}",
            f"invariant under symbolic boost: {boost.status}",
            f"invariant under axis rotations: {all(r.status for r in rotations)}"]
    if factor is not None:
        text.append(f"equals Schrodinger operator (projective), factor {factor}")
    text.extend(P.pretty().splitlines())
    ok = boost.status and all(r.status for r in rotations)
    return report, text, [_op_latex(P)], ok, {}


def _planewave(cfg: RunConfig):
    m = cfg.mass
    L = levy_leblond(m)
    K = cfg.kmax
    ks = [(Fraction(a), Fraction(b), Fraction(0)) for a in range(-K, K + 1) for b in range(0, K + 1)]
    rows = []
    for k in ks:
        on_shell = sum(x * x for x in k) / (2 * m)
        rows.extend(dispersion_scan(L, [k], [on_shell, on_shell + Fraction(1, 2)]))
    law = all((r["nullity"] > 0) == (Fraction(r["omega"]) == (
        Fraction(r["k1"]) ** 2 + Fraction(r["k2"]) ** 2 + Fraction(r["k3"]) ** 2) / (2 * m))
        for r in rows)
    report = {"rows": rows, "dispersion_law_holds": law}
    text = [f"{len(rows)} (k, omega) samples; nullity > 0 exactly on shell: {law}"]
    return report, text, [], law, {"planewave.csv": scan_to_csv(rows)}


def _couple(cfg: RunConfig):
    rep = derivation_report(levy_leblond(cfg.mass), cfg.mass)
    text = ["coupled pair:"] + ["  " + line for line in rep["coupled_pair_latex"]]
    text += ["eliminated:", "  " + rep["eliminated_latex"],
             f"matches closed form: {rep['matches_closed_form']}",
             f"free limit matches: {rep['free_limit_matches']}"]
    latex = ["\\begin{align*}"] + [line + " \\\\" for line in rep["coupled_pair_latex"]]
    latex += [f"\\left[{rep['eliminated_latex']}\\right]\\varphi &= 0", "\\end{align*}",
              f"% spin term: {rep['spin_term_latex']}"]
    ok = rep["matches_closed_form"] and rep["free_limit_matches"]
    return rep, text, latex, ok, {}


def _prop_suite(cfg: RunConfig):
    results = run_suite(cfg.mass)
    report = {name: r.to_json() for name, r in results.items()}
    text = [f"{'PASS' if r.status else 'FAIL'}  {name}: {r.claim}" for name, r in results.items()]
    return report, text, [], all(r.status for r in results.values()), {}


HANDLERS = {
    "derive": _derive,
    "power": _power,
    "planewave": _planewave,
    "couple": _couple,
    "prop-suite": _prop_suite,
}


def _op_latex(op) -> str:
    parts = []
    for idx, M in op.terms.items():
        rows = " \\\\ ".join(" & ".join(str(M[r, c]) for c in range(M.cols)) for r in range(M.rows))
        d = []
        if idx[0]:
            d.append("\\partial_t" + (f"^{idx[0]}" if idx[0] > 1 else ""))
        for j in (1, 2, 3):
            if idx[j]:
                d.append(f"\\partial_{j}" + (f"^{idx[j]}" if idx[j] > 1 else ""))
        parts.append(f"\\begin{{pmatrix}} {rows} \\end{{pmatrix}}{' '.join(d)}")
    return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# output


def _atomic_write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render(cfg: RunConfig, report: dict, text: List[str], latex: List[str], ok: bool) -> str:
    if cfg.format == "json":
        doc = {"schema": SCHEMA, "command": cfg.command,
               "config": {"ncomp": cfg.ncomp, "order": cfg.order,
                          "forbid_mixed": cfg.forbid_mixed, "mass": str(cfg.mass),
                          "N": cfg.power},
               "status": "pass" if ok else "fail", "report": report}
        return json.dumps(doc, indent=2) + "\n"
    if cfg.format == "latex":
        return "\n".join(latex or ["% no LaTeX transcript for this command"] + [
            "% " + line for line in text]) + "\n"
    return "\n".join(text) + "\n"


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        report, text, latex, ok, extra = HANDLERS[cfg.command](cfg)
    except (InternalInconsistency, GeneratorError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except UnsupportedDimension as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    body = render(cfg, report, text, latex, ok)
    if cfg.output_dir is not None:
        ext = {"json": "json", "latex": "tex", "text": "txt"}[cfg.format]
        _atomic_write(cfg.output_dir / f"{cfg.command}.{ext}", body)
        for name, content in extra.items():
            _atomic_write(cfg.output_dir / name, content)
    else:
        stdout.write(body)
        if "planewave.csv" in extra and cfg.format == "text":
            stdout.write(extra["planewave.csv"])
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mass", default="1", help="positive rational mass (default 1)")
    common.add_argument("--output-dir", default=None,
                        help=f"write report files here instead of stdout (env: {OUTPUT_ENV})")
    common.add_argument("--format", choices=("json", "latex", "text"), default="json")

    parser = argparse.ArgumentParser(prog="galinv", description=(
        "Search for Galilean-invariant spinor wave equations and check their properties."))
    sub = parser.add_subparsers(dest="command", required=True)
    d = sub.add_parser("derive", parents=[common], help="invariant family for an ansatz")
    d.add_argument("--ncomp", type=int, default=4)
    d.add_argument("--order", type=int, default=1)
    d.add_argument("--forbid-mixed", action="store_true")
    p = sub.add_parser("power", parents=[common], help="powers of the Levy-Leblond operator")
    p.add_argument("--N", dest="power", type=int, default=2)
    w = sub.add_parser("planewave", parents=[common], help="dispersion scan as CSV")
    w.add_argument("--kmax", type=int, default=2)
    sub.add_parser("couple", parents=[common], help="minimal coupling and elimination")
    sub.add_parser("prop-suite", parents=[common], help="run every check; nonzero exit on failure")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    try:
        mass = parse_rational(ns.mass)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"--mass: {exc}") from exc
    out = ns.output_dir or os.environ.get(OUTPUT_ENV)
    return RunConfig(
        command=ns.command,
        ncomp=getattr(ns, "ncomp", 4),
        order=getattr(ns, "order", 1),
        forbid_mixed=getattr(ns, "forbid_mixed", False),
        mass=mass,
        output_dir=Path(out) if out else None,
        format=ns.format,
        power=getattr(ns, "power", 2),
        kmax=getattr(ns, "kmax", 2),
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
